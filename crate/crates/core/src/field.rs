//! Quasi-static magnetic field of filamentary currents over a perfect ground plane.
//!
//! Each straight segment contributes the closed-form Biot–Savart field of a
//! finite filament. The ground plane is replaced by the mirrored trace
//! (`z → -z`) carrying the negated current, which enforces `Hz = 0` on `z = 0`.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul};

use crate::error::{Error, Result};
use crate::model::{DriveSpec, Phasor, Substrate, Termination, TracePath, Vec3, C0};

/// Minimum distance between an observation point and a filament's supporting line (m).
pub const DEFAULT_EPS_GEOM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentCurrent {
    pub start: Vec3,
    pub end: Vec3,
    /// RMS current flowing from `start` to `end` (A).
    pub current: Phasor,
}

impl SegmentCurrent {
    pub fn new(start: Vec3, end: Vec3, current: Phasor) -> Result<Self> {
        if (end - start).norm() == 0.0 {
            return Err(Error::invalid("segment", "start and end coincide"));
        }
        Ok(SegmentCurrent {
            start,
            end,
            current,
        })
    }

    /// Ground-plane image: mirrored endpoints, negated current.
    pub fn image(&self) -> SegmentCurrent {
        SegmentCurrent {
            start: self.start.mirrored_z(),
            end: self.end.mirrored_z(),
            current: -self.current,
        }
    }
}

/// Complex magnetic field vector (A/m, RMS).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HVector {
    pub hx: Phasor,
    pub hy: Phasor,
    pub hz: Phasor,
}

impl HVector {
    pub const ZERO: HVector = HVector {
        hx: Phasor::new(0.0, 0.0),
        hy: Phasor::new(0.0, 0.0),
        hz: Phasor::new(0.0, 0.0),
    };

    pub fn from_real(v: Vec3, scale: Phasor) -> Self {
        HVector {
            hx: scale * v.x,
            hy: scale * v.y,
            hz: scale * v.z,
        }
    }

    /// Projection onto a real direction.
    pub fn along(&self, dir: Vec3) -> Phasor {
        self.hx * dir.x + self.hy * dir.y + self.hz * dir.z
    }

    /// `sqrt(|hx|² + |hy|² + |hz|²)`.
    pub fn magnitude(&self) -> f64 {
        (self.hx.norm_sqr() + self.hy.norm_sqr() + self.hz.norm_sqr()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        [self.hx, self.hy, self.hz]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Add for HVector {
    type Output = HVector;
    fn add(self, o: HVector) -> HVector {
        HVector {
            hx: self.hx + o.hx,
            hy: self.hy + o.hy,
            hz: self.hz + o.hz,
        }
    }
}

impl AddAssign for HVector {
    fn add_assign(&mut self, o: HVector) {
        self.hx += o.hx;
        self.hy += o.hy;
        self.hz += o.hz;
    }
}

impl Mul<Phasor> for HVector {
    type Output = HVector;
    fn mul(self, k: Phasor) -> HVector {
        HVector {
            hx: self.hx * k,
            hy: self.hy * k,
            hz: self.hz * k,
        }
    }
}

/// Field per ampere of a straight filament, or the perpendicular distance
/// when the point lies within `eps_geom` of the filament's line.
fn unit_current_field(start: Vec3, end: Vec3, p: Vec3, eps_geom: f64) -> Result<Vec3, f64> {
    let axis = end - start;
    let len = axis.norm();
    let u = axis * (1.0 / len);
    let r1 = p - start;
    let r2 = p - end;
    let along = r1.dot(u);
    let perp = r1 - u * along;
    let rho = perp.norm();
    if !(rho >= eps_geom) {
        return Err(rho);
    }
    // sinθ₂ − sinθ₁ with angles measured from the foot of the perpendicular.
    let sin_diff = along / r1.norm() - r2.dot(u) / r2.norm();
    let phi_hat = u.cross(perp * (1.0 / rho));
    Ok(phi_hat * (sin_diff / (4.0 * PI * rho)))
}

/// Biot–Savart field of one finite straight segment.
pub fn h_segment(seg: &SegmentCurrent, p: Vec3, eps_geom: f64) -> Result<HVector> {
    unit_current_field(seg.start, seg.end, p, eps_geom)
        .map(|g| HVector::from_real(g, seg.current))
        .map_err(|distance| Error::Singularity {
            segment: 0,
            image: false,
            point: p.to_array(),
            distance,
        })
}

/// A trace's segments and their ground-plane images, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct GroundedSources {
    segments: Vec<SegmentCurrent>,
    eps_geom: f64,
}

impl GroundedSources {
    pub fn new(trace: &TracePath, currents: &[Phasor], eps_geom: f64) -> Result<Self> {
        if currents.len() != trace.segment_count() {
            return Err(Error::invalid(
                "currents",
                format!(
                    "{} currents given for {} segments",
                    currents.len(),
                    trace.segment_count()
                ),
            ));
        }
        let segments = trace
            .segments()
            .zip(currents)
            .map(|((start, end), &current)| SegmentCurrent {
                start,
                end,
                current,
            })
            .collect();
        Ok(GroundedSources { segments, eps_geom })
    }

    pub fn segments(&self) -> &[SegmentCurrent] {
        &self.segments
    }

    /// Total field at `p` (real segments plus images). Requires `p.z >= 0`.
    pub fn h_at(&self, p: Vec3) -> Result<HVector> {
        if !(p.z >= 0.0) {
            return Err(Error::Range(format!(
                "observation point z = {} lies below the ground plane",
                p.z
            )));
        }
        let mut total = HVector::ZERO;
        for (k, seg) in self.segments.iter().enumerate() {
            for image in [false, true] {
                let s = if image { seg.image() } else { *seg };
                let g =
                    unit_current_field(s.start, s.end, p, self.eps_geom).map_err(|distance| {
                        Error::Singularity {
                            segment: k,
                            image,
                            point: p.to_array(),
                            distance,
                        }
                    })?;
                total += HVector::from_real(g, s.current);
            }
        }
        Ok(total)
    }
}

/// Field of `trace` above a perfect ground plane at `z = 0`.
pub fn h_trace_grounded(
    trace: &TracePath,
    currents: &[Phasor],
    p: Vec3,
    eps_geom: f64,
) -> Result<HVector> {
    GroundedSources::new(trace, currents, eps_geom)?.h_at(p)
}

/// Field magnitude of an infinite line at height `h` over ground, observed `y` above the line:
/// `i·(1/y − 1/(y + 2h)) / 2π`.
pub fn closed_form_line_h(y: f64, h: f64, i_rms: f64) -> f64 {
    assert!(
        y > 0.0 && h > 0.0 && i_rms >= 0.0,
        "need y > 0, h > 0, i >= 0"
    );
    i_rms * (1.0 / y - 1.0 / (y + 2.0 * h)) / (2.0 * PI)
}

/// Static effective permittivity of a microstrip (Hammerstad).
pub fn eps_eff_hammerstad(eps_r: f64, h: f64, width: f64) -> f64 {
    (eps_r + 1.0) / 2.0 + (eps_r - 1.0) / 2.0 / (1.0 + 12.0 * h / width).sqrt()
}

/// Guided propagation constant β (rad/m).
pub fn beta(f: f64, eps_eff: f64) -> f64 {
    2.0 * PI * f * eps_eff.sqrt() / C0
}

/// Per-segment current phasors of a trace fed at its first vertex.
///
/// The incident wave has RMS amplitude `sqrt(power / z0_line)`. A matched line
/// carries it unchanged with phase `-β·ℓ` at the segment midpoint; open and
/// short terminations add the wave reflected at the far end, giving
/// `2j·sin βℓ'` and `2·cos βℓ'` standing waves (ℓ' measured from the far end).
pub fn current_distribution(
    trace: &TracePath,
    f: f64,
    drive: &DriveSpec,
    substrate: &Substrate,
) -> Result<Vec<Phasor>> {
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::Range(format!("frequency must be > 0, got {f}")));
    }
    let incident = (drive.power / trace.z0_line).sqrt();
    let b = beta(
        f,
        eps_eff_hammerstad(substrate.eps_r, substrate.h, trace.width),
    );
    let total = trace.length();
    let delay = Phasor::from_polar(1.0, -b * total);
    let currents = trace
        .segment_midpoint_arclengths()
        .into_iter()
        .map(|s| match trace.termination {
            Termination::Matched => Phasor::from_polar(incident, -b * s),
            Termination::Short => delay * (2.0 * incident * (b * (total - s)).cos()),
            Termination::Open => delay * Phasor::new(0.0, 2.0 * incident * (b * (total - s)).sin()),
        })
        .collect();
    Ok(currents)
}

/// Sub-segments per guided wavelength used by [`excite`].
pub const SEGMENTS_PER_WAVELENGTH: f64 = 64.0;

/// Subdivides `trace` finely enough for its phase progression at `f` and
/// attaches the driven currents.
pub fn excite(
    trace: &TracePath,
    f: f64,
    drive: &DriveSpec,
    substrate: &Substrate,
    eps_geom: f64,
) -> Result<GroundedSources> {
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::Range(format!("frequency must be > 0, got {f}")));
    }
    let eps_eff = eps_eff_hammerstad(substrate.eps_r, substrate.h, trace.width);
    let wavelength = 2.0 * PI / beta(f, eps_eff);
    let fine = trace.subdivided(wavelength / SEGMENTS_PER_WAVELENGTH);
    let currents = current_distribution(&fine, f, drive, substrate)?;
    GroundedSources::new(&fine, &currents, eps_geom)
}
