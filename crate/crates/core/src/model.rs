//! Value types shared by the field engine, the probe model and the scan runner.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// RMS complex amplitude, `exp(+jωt)` convention.
pub type Phasor = Complex64;

/// Vacuum permeability (H/m), the pre-2019 exact value.
pub const MU0: f64 = 4.0e-7 * PI;
/// Speed of light in vacuum (m/s).
pub const C0: f64 = 299_792_458.0;

/// Tolerance used when checking that grid extents are whole multiples of the step.
pub const GRID_TOL: f64 = 1e-9;

/// `20·log10(x / reference)`.
pub fn db20(x: f64, reference: f64) -> Result<f64> {
    if !(x > 0.0) || !(reference > 0.0) || !x.is_finite() || !reference.is_finite() {
        return Err(Error::Domain(format!(
            "cannot express in dB: magnitude {x} against reference {reference}"
        )));
    }
    Ok(20.0 * (x / reference).log10())
}

/// Inverse of [`db20`].
pub fn undb20(db: f64, reference: f64) -> f64 {
    reference * 10f64.powf(db / 20.0)
}

/// `10·log10(p / reference)` for power quantities.
pub fn db10(p: f64, reference: f64) -> Result<f64> {
    db20(p, reference).map(|v| v / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self * (1.0 / self.norm())
    }

    /// Reflection through the ground plane `z = 0`.
    pub fn mirrored_z(self) -> Vec3 {
        Vec3::new(self.x, self.y, -self.z)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Dielectric substrate and metallization of the PCB.
///
/// Loss tangent, metallization thickness and conductivity are carried for
/// configuration fidelity; the field engine is lossless and does not use them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Substrate {
    /// Dielectric thickness (m).
    pub h: f64,
    pub eps_r: f64,
    pub tan_d: f64,
    /// Metallization thickness (m).
    pub t: f64,
    /// Metallization conductivity (S/m).
    pub sigma: f64,
}

impl Substrate {
    pub fn new(h: f64, eps_r: f64, tan_d: f64, t: f64, sigma: f64) -> Result<Self> {
        let bad = |reason: &str| Err(Error::invalid("substrate", reason));
        if !(h > 0.0) || !h.is_finite() {
            return bad("thickness h must be > 0");
        }
        if !(eps_r >= 1.0) || !eps_r.is_finite() {
            return bad("eps_r must be >= 1");
        }
        if !(tan_d >= 0.0) || !tan_d.is_finite() {
            return bad("tan_d must be >= 0");
        }
        if !(t >= 0.0) || !t.is_finite() {
            return bad("metallization thickness t must be >= 0");
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return bad("conductivity must be > 0");
        }
        Ok(Substrate {
            h,
            eps_r,
            tan_d,
            t,
            sigma,
        })
    }

    /// FR4 board used for both the probe and the DUT.
    pub fn fr4() -> Self {
        Substrate {
            h: 1.6e-3,
            eps_r: 4.6,
            tan_d: 0.016,
            t: 35e-6,
            sigma: 58e6,
        }
    }
}

impl Default for Substrate {
    fn default() -> Self {
        Substrate::fr4()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    #[default]
    Matched,
    Open,
    Short,
}

/// Current-carrying conductor: a polyline in the plane `z = substrate.h`.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePath {
    vertices: Vec<Vec3>,
    /// Conductor width (m); documentation only for field synthesis.
    pub width: f64,
    /// Characteristic impedance (Ω).
    pub z0_line: f64,
    pub termination: Termination,
}

impl TracePath {
    pub fn new(
        vertices: Vec<Vec3>,
        width: f64,
        z0_line: f64,
        termination: Termination,
    ) -> Result<Self> {
        let bad = |reason: String| Err(Error::invalid("trace", reason));
        if vertices.len() < 2 {
            return bad(format!("need at least 2 vertices, got {}", vertices.len()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !v.is_finite() {
                return bad(format!("vertex {i} is not finite"));
            }
            if !(v.z > 0.0) {
                return bad(format!(
                    "vertex {i} is not above the ground plane (z = {})",
                    v.z
                ));
            }
        }
        for (i, w) in vertices.windows(2).enumerate() {
            if (w[1] - w[0]).norm() == 0.0 {
                return bad(format!("vertices {i} and {} coincide", i + 1));
            }
        }
        if !(width > 0.0) || !width.is_finite() {
            return bad("width must be > 0".into());
        }
        if !(z0_line > 0.0) || !z0_line.is_finite() {
            return bad("characteristic impedance must be > 0".into());
        }
        Ok(TracePath {
            vertices,
            width,
            z0_line,
            termination,
        })
    }

    /// Planar polyline (x, y) placed at height `substrate.h`.
    pub fn planar(
        xy: &[(f64, f64)],
        substrate: &Substrate,
        width: f64,
        z0_line: f64,
        termination: Termination,
    ) -> Result<Self> {
        let vertices = xy
            .iter()
            .map(|&(x, y)| Vec3::new(x, y, substrate.h))
            .collect();
        TracePath::new(vertices, width, z0_line, termination)
    }

    /// The standard "I" line: 200 mm long, 3 mm wide, 50 Ω, along x and centered at the origin.
    pub fn standard_line(substrate: &Substrate) -> Self {
        TracePath::planar(
            &[(-0.1, 0.0), (0.1, 0.0)],
            substrate,
            3e-3,
            50.0,
            Termination::Matched,
        )
        .expect("standard line is valid")
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vec3, Vec3)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    /// Arclength from the feed (first vertex) to the midpoint of each segment.
    pub fn segment_midpoint_arclengths(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.segments()
            .map(|(a, b)| {
                let len = (b - a).norm();
                let mid = acc + 0.5 * len;
                acc += len;
                mid
            })
            .collect()
    }

    /// Point at half the total arclength.
    pub fn midpoint(&self) -> Vec3 {
        let half = 0.5 * self.length();
        let mut acc = 0.0;
        for (a, b) in self.segments() {
            let len = (b - a).norm();
            if acc + len >= half {
                let t = (half - acc) / len;
                return a + (b - a) * t;
            }
            acc += len;
        }
        *self.vertices.last().unwrap()
    }

    /// Splits every segment into equal pieces no longer than `max_len`.
    pub fn subdivided(&self, max_len: f64) -> TracePath {
        assert!(max_len > 0.0, "subdivision length must be positive");
        let mut vertices = vec![self.vertices[0]];
        for (a, b) in self.segments() {
            let n = ((b - a).norm() / max_len).ceil().max(1.0) as usize;
            for k in 1..=n {
                let v = if k == n {
                    b
                } else {
                    a + (b - a) * (k as f64 / n as f64)
                };
                vertices.push(v);
            }
        }
        TracePath {
            vertices,
            ..self.clone()
        }
    }
}

/// Square magnetic loop probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopProbe {
    pub center: Vec3,
    /// Unit normal (loop axis); the probe senses `H·normal`.
    pub normal: Vec3,
    /// Loop side (m).
    pub side: f64,
    /// Loop conductor width (m); not used by the coupling model.
    pub trace_width: f64,
    /// Port reference impedance (Ω).
    pub port_z: f64,
}

impl LoopProbe {
    pub fn new(
        center: Vec3,
        normal: Vec3,
        side: f64,
        trace_width: f64,
        port_z: f64,
    ) -> Result<Self> {
        let bad = |reason: &str| Err(Error::invalid("probe", reason));
        if !center.is_finite() {
            return bad("center is not finite");
        }
        if !normal.is_finite() || (normal.norm() - 1.0).abs() > 1e-12 {
            return bad("normal must be a unit vector");
        }
        if !(side > 0.0) || !side.is_finite() {
            return bad("side must be > 0");
        }
        if !(trace_width >= 0.0) || !trace_width.is_finite() {
            return bad("trace width must be >= 0");
        }
        if !(port_z > 0.0) || !port_z.is_finite() {
            return bad("port impedance must be > 0");
        }
        Ok(LoopProbe {
            center,
            normal,
            side,
            trace_width,
            port_z,
        })
    }

    /// 4 mm loop of 0.5 mm track, 50 Ω port, normal along `normal`.
    pub fn standard(normal: Vec3) -> Self {
        LoopProbe::new(Vec3::ZERO, normal.normalized(), 4e-3, 0.5e-3, 50.0)
            .expect("standard probe is valid")
    }

    /// Orthonormal in-plane axes `(u, v)` with `u × v = normal`.
    pub fn in_plane_axes(&self) -> (Vec3, Vec3) {
        let n = self.normal;
        let horiz = n.cross(Vec3::Z);
        let u = if horiz.norm() < 1e-9 {
            Vec3::X
        } else {
            horiz.normalized()
        };
        let v = n.cross(u);
        (u, v)
    }

    /// Half of the loop's vertical extent.
    pub fn vertical_half_extent(&self) -> f64 {
        let (u, v) = self.in_plane_axes();
        0.5 * self.side * (u.z.abs() + v.z.abs())
    }

    /// Lowest z reached by the loop.
    pub fn bottom_z(&self) -> f64 {
        self.center.z - self.vertical_half_extent()
    }

    /// Same probe moved so that its lowest point (the tip) sits at `tip`,
    /// horizontally centered on it.
    pub fn with_tip_at(&self, tip: Vec3) -> LoopProbe {
        LoopProbe {
            center: tip + Vec3::Z * self.vertical_half_extent(),
            ..*self
        }
    }
}

/// Rectangular raster surface. `z_height` is measured from the conductor plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub dx: f64,
    pub dy: f64,
    pub z_height: f64,
    nx: usize,
    ny: usize,
}

fn axis_count(min: f64, max: f64, step: f64, axis: &str) -> Result<usize> {
    let span = max - min;
    let n = (span / step).round();
    if (span - n * step).abs() >= GRID_TOL {
        return Err(Error::invalid(
            "grid",
            format!("{axis} extent {span} m is not a whole multiple of step {step} m"),
        ));
    }
    Ok(n as usize + 1)
}

impl ScanGrid {
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        dx: f64,
        dy: f64,
        z_height: f64,
    ) -> Result<Self> {
        let bad = |reason: &str| Err(Error::invalid("grid", reason));
        if ![x_min, x_max, y_min, y_max, dx, dy, z_height]
            .iter()
            .all(|v| v.is_finite())
        {
            return bad("all grid parameters must be finite");
        }
        if x_max < x_min || y_max < y_min {
            return bad("max extent must not be below min extent");
        }
        if !(dx > 0.0) || !(dy > 0.0) {
            return bad("steps must be > 0");
        }
        if !(z_height > 0.0) {
            return bad("z_height must be > 0");
        }
        let nx = axis_count(x_min, x_max, dx, "x")?;
        let ny = axis_count(y_min, y_max, dy, "y")?;
        Ok(ScanGrid {
            x_min,
            x_max,
            y_min,
            y_max,
            dx,
            dy,
            z_height,
            nx,
            ny,
        })
    }

    /// Single line along y at fixed `x`.
    pub fn line_y(x: f64, y_min: f64, y_max: f64, dy: f64, z_height: f64) -> Result<Self> {
        ScanGrid::new(x, x, y_min, y_max, dy, dy, z_height)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.x_min + ix as f64 * self.dx
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.y_min + iy as f64 * self.dy
    }

    /// Row-major index (y outer, x inner).
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn indices(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    /// All grid points, y outer and x inner, with `z = z_height`.
    pub fn grid_points(&self) -> Vec<Vec3> {
        (0..self.ny)
            .flat_map(|iy| (0..self.nx).map(move |ix| (ix, iy)))
            .map(|(ix, iy)| Vec3::new(self.x(ix), self.y(iy), self.z_height))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencySweep {
    pub f_min: f64,
    pub f_max: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl FrequencySweep {
    pub fn new(f_min: f64, f_max: f64, n_points: usize, spacing: Spacing) -> Result<Self> {
        if !(f_min > 0.0) || !(f_max >= f_min) || !f_max.is_finite() {
            return Err(Error::invalid("sweep", "need 0 < f_min <= f_max"));
        }
        if n_points == 0 {
            return Err(Error::invalid("sweep", "n_points must be >= 1"));
        }
        Ok(FrequencySweep {
            f_min,
            f_max,
            n_points,
            spacing,
        })
    }

    pub fn single(f: f64) -> Result<Self> {
        FrequencySweep::new(f, f, 1, Spacing::Linear)
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n_points;
        if n == 1 {
            return vec![self.f_min];
        }
        (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                if k == n - 1 {
                    return self.f_max;
                }
                match self.spacing {
                    Spacing::Linear => self.f_min + t * (self.f_max - self.f_min),
                    Spacing::Log => self.f_min * (self.f_max / self.f_min).powf(t),
                }
            })
            .collect()
    }
}

/// Source driving the DUT.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    /// Available power (W).
    pub power: f64,
    /// Source impedance (Ω).
    pub source_z: f64,
}

impl DriveSpec {
    pub fn new(power: f64, source_z: f64) -> Result<Self> {
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::invalid("drive", "power must be > 0"));
        }
        if !(source_z > 0.0) || !source_z.is_finite() {
            return Err(Error::invalid("drive", "source impedance must be > 0"));
        }
        Ok(DriveSpec { power, source_z })
    }

    pub fn from_dbm(dbm: f64, source_z: f64) -> Result<Self> {
        DriveSpec::new(1e-3 * 10f64.powf(dbm / 10.0), source_z)
    }

    pub fn power_dbm(&self) -> f64 {
        10.0 * (self.power / 1e-3).log10()
    }
}

impl Default for DriveSpec {
    /// -10 dBm into 50 Ω.
    fn default() -> Self {
        DriveSpec {
            power: 1e-4,
            source_z: 50.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_constants() {
        let s = Substrate::default();
        assert_eq!(s.h, 1.6e-3);
        assert_eq!(s.eps_r, 4.6);
        assert_eq!(s.t, 35e-6);
        assert_eq!(s.tan_d, 0.016);
        assert_eq!(s.sigma, 58e6);

        let p = LoopProbe::standard(Vec3::Y);
        assert_eq!(p.side, 4e-3);
        assert_eq!(p.trace_width, 0.5e-3);

        let line = TracePath::standard_line(&s);
        assert_eq!(line.width, 3e-3);
        assert_eq!(line.z0_line, 50.0);

        let d = DriveSpec::default();
        assert_eq!(d.power, 1e-4);
        assert!((DriveSpec::from_dbm(-10.0, 50.0).unwrap().power - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn grid_counts() {
        // 20 mm x 25 mm surface at 0.5 mm.
        let g = ScanGrid::new(-10e-3, 10e-3, -12.5e-3, 12.5e-3, 0.5e-3, 0.5e-3, 1e-3).unwrap();
        assert_eq!((g.nx(), g.ny()), (41, 51));
        assert_eq!(g.grid_points().len(), 2091);

        let line = ScanGrid::line_y(0.0, -5e-3, 5e-3, 0.5e-3, 1e-3).unwrap();
        assert_eq!(line.grid_points().len(), 21);

        let one = ScanGrid::new(1e-3, 1e-3, 2e-3, 2e-3, 1e-3, 1e-3, 1e-3).unwrap();
        let pts = one.grid_points();
        assert_eq!(pts, vec![Vec3::new(1e-3, 2e-3, 1e-3)]);
    }

    #[test]
    fn grid_order_is_row_major() {
        let g = ScanGrid::new(0.0, 2.0, 0.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        let pts: Vec<(f64, f64)> = g.grid_points().iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(
            pts,
            vec![
                (0.0, 0.0),
                (1.0, 0.0),
                (2.0, 0.0),
                (0.0, 1.0),
                (1.0, 1.0),
                (2.0, 1.0)
            ]
        );
        assert!(g.grid_points().iter().all(|p| p.z == 0.5));
        assert_eq!(g.indices(g.index(2, 1)), (2, 1));
    }

    #[test]
    fn grid_rejects_non_divisible_extent() {
        assert!(ScanGrid::new(0.0, 1.0e-3, 0.0, 0.0, 0.3e-3, 1e-3, 1e-3).is_err());
        assert!(ScanGrid::new(0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(ScanGrid::new(1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ScanGrid::new(0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn db_values() {
        assert_eq!(db20(1.0, 1.0).unwrap(), 0.0);
        assert!((db20(0.1, 1.0).unwrap() + 20.0).abs() < 1e-12);
        assert!((db20(0.1715, 1.0).unwrap() - (-15.31)).abs() < 0.005);
        assert!(matches!(db20(0.0, 1.0), Err(Error::Domain(_))));
        assert!(db20(-1.0, 1.0).is_err());
        assert!(db20(1.0, 0.0).is_err());
    }

    #[test]
    fn sweep_frequencies() {
        let s = FrequencySweep::new(1e8, 1e9, 2, Spacing::Log).unwrap();
        assert_eq!(s.frequencies(), vec![1e8, 1e9]);
        let s = FrequencySweep::new(1e8, 1e10, 3, Spacing::Log).unwrap();
        assert!((s.frequencies()[1] - 1e9).abs() < 1e-3);
        let s = FrequencySweep::new(2e9, 3e9, 2, Spacing::Linear).unwrap();
        assert_eq!(s.frequencies(), vec![2e9, 3e9]);
        assert!(FrequencySweep::new(1e9, 1e9, 0, Spacing::Linear).is_err());
        assert!(FrequencySweep::new(0.0, 1e9, 3, Spacing::Linear).is_err());
    }

    #[test]
    fn trace_validation() {
        let s = Substrate::default();
        assert!(TracePath::planar(&[(0.0, 0.0)], &s, 1e-3, 50.0, Termination::Matched).is_err());
        assert!(TracePath::planar(
            &[(0.0, 0.0), (0.0, 0.0)],
            &s,
            1e-3,
            50.0,
            Termination::Matched
        )
        .is_err());
        assert!(TracePath::new(
            vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)],
            1e-3,
            50.0,
            Termination::Matched
        )
        .is_err());
        let t = TracePath::planar(
            &[(0.0, 0.0), (0.01, 0.0), (0.01, 0.02)],
            &s,
            1e-3,
            50.0,
            Termination::Matched,
        )
        .unwrap();
        assert!((t.length() - 0.03).abs() < 1e-15);
        let m = t.midpoint();
        assert!((m.x - 0.01).abs() < 1e-15 && (m.y - 0.005).abs() < 1e-15);
        let fine = t.subdivided(1e-3);
        assert_eq!(fine.segment_count(), 30);
        assert!((fine.length() - 0.03).abs() < 1e-14);
        assert_eq!(fine.vertices().last(), t.vertices().last());
    }

    #[test]
    fn probe_tip_placement() {
        let p = LoopProbe::standard(Vec3::Y);
        let placed = p.with_tip_at(Vec3::new(0.0, 0.0, 2.6e-3));
        assert!((placed.bottom_z() - 2.6e-3).abs() < 1e-15);
        assert!((placed.center.z - 4.6e-3).abs() < 1e-15);
        let flat = LoopProbe::standard(Vec3::Z).with_tip_at(Vec3::new(0.0, 0.0, 1e-3));
        assert_eq!(flat.center.z, 1e-3);
        let (u, v) = p.in_plane_axes();
        let n = u.cross(v);
        assert!((n - p.normal).norm() < 1e-15);
        assert!(LoopProbe::new(Vec3::ZERO, Vec3::new(1.0, 1.0, 0.0), 1e-3, 0.0, 50.0).is_err());
    }

    proptest! {
        #[test]
        fn db_round_trip(exp in -6.0f64..6.0, mant in 1.0f64..10.0, rexp in -3.0f64..3.0) {
            let x = mant * 10f64.powf(exp);
            let r = 10f64.powf(rexp);
            let back = undb20(db20(x, r).unwrap(), r);
            prop_assert!(((back - x) / x).abs() < 1e-12);
        }
    }
}
