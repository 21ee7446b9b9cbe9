//! Square-loop probe response: flux, Faraday EMF, port voltage and S21.
//!
//! The loop is electrically small: no self-inductance, no resonance, and no
//! back-action on the DUT. The port is a Thevenin source (the EMF) into either
//! a matched receiver or an open circuit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{excite, GroundedSources, HVector};
use crate::io::NetworkData;
use crate::model::{DriveSpec, FrequencySweep, LoopProbe, Phasor, Substrate, TracePath, Vec3, MU0};
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PortLoading {
    /// Matched receiver: half the EMF appears at the port.
    #[default]
    MatchedHalving,
    OpenCircuit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortWaveModel {
    pub probe: LoopProbe,
    pub loading: PortLoading,
    /// Gauss–Legendre points per loop axis.
    pub quad_n: usize,
}

impl PortWaveModel {
    pub fn new(probe: LoopProbe, loading: PortLoading, quad_n: usize) -> Result<Self> {
        if quad_n < 2 {
            return Err(Error::invalid("port model", "quad_n must be >= 2"));
        }
        Ok(PortWaveModel {
            probe,
            loading,
            quad_n,
        })
    }
}

/// `∫ H·n dA` over the loop area (A·m); multiply by µ0 for webers.
pub fn loop_flux<F>(probe: &LoopProbe, field: F, quad_n: usize) -> Result<Phasor>
where
    F: Fn(Vec3) -> Result<HVector>,
{
    if quad_n < 2 {
        return Err(Error::invalid("quadrature", "quad_n must be >= 2"));
    }
    if !(probe.bottom_z() > 0.0) {
        return Err(Error::Range(format!(
            "probe centered at {:?} reaches below the ground plane",
            probe.center.to_array()
        )));
    }
    let rule = GaussLegendre::new(quad_n);
    let half = 0.5 * probe.side;
    let (u, v) = probe.in_plane_axes();
    let mut total = Phasor::new(0.0, 0.0);
    for (a, wa) in rule.nodes.iter().zip(&rule.weights) {
        let mut row = Phasor::new(0.0, 0.0);
        for (b, wb) in rule.nodes.iter().zip(&rule.weights) {
            let p = probe.center + u * (half * a) + v * (half * b);
            let h = field(p).map_err(|e| Error::Probe {
                center: probe.center.to_array(),
                source: Box::new(e),
            })?;
            row += h.along(probe.normal) * *wb;
        }
        total += row * *wa;
    }
    Ok(total * (half * half))
}

/// Faraday EMF `−jωµ0·flux`.
pub fn induced_emf(flux: Phasor, f: f64) -> Phasor {
    let omega = 2.0 * std::f64::consts::PI * f;
    Phasor::new(0.0, -omega * MU0) * flux
}

pub fn port_voltage(emf: Phasor, loading: PortLoading) -> Phasor {
    match loading {
        PortLoading::MatchedHalving => emf * 0.5,
        PortLoading::OpenCircuit => emf,
    }
}

/// `b2/a1` with `|a1|² = power` and `b2 = v_port/√z_port`.
pub fn synthesize_s21(v_port: Phasor, port_z: f64, drive: &DriveSpec) -> Phasor {
    v_port / (port_z * drive.power).sqrt()
}

/// Every stage of the probe chain at one position and frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReading {
    pub flux: Phasor,
    pub emf: Phasor,
    pub v_port: Phasor,
    pub s21: Phasor,
}

/// Probe response with its tip at `tip` (the loop hangs above it).
pub fn probe_reading(
    model: &PortWaveModel,
    sources: &GroundedSources,
    tip: Vec3,
    f: f64,
    drive: &DriveSpec,
) -> Result<ProbeReading> {
    let probe = model.probe.with_tip_at(tip);
    let flux = loop_flux(&probe, |p| sources.h_at(p), model.quad_n)?;
    let emf = induced_emf(flux, f);
    let v_port = port_voltage(emf, model.loading);
    let s21 = synthesize_s21(v_port, probe.port_z, drive);
    Ok(ProbeReading {
        flux,
        emf,
        v_port,
        s21,
    })
}

/// Synthetic two-port network of the probe held `height` above the middle of
/// `trace`. S21 = S12 is the probe transmission; S11 = S22 = 0 (not modeled).
pub fn probe_transfer(
    model: &PortWaveModel,
    trace: &TracePath,
    substrate: &Substrate,
    height: f64,
    sweep: &FrequencySweep,
    drive: &DriveSpec,
    eps_geom: f64,
) -> Result<NetworkData> {
    let tip = trace.midpoint() + Vec3::Z * height;
    let readings: Vec<Result<Phasor>> = sweep
        .frequencies()
        .into_par_iter()
        .map(|f| {
            let sources = excite(trace, f, drive, substrate, eps_geom)?;
            probe_reading(model, &sources, tip, f, drive).map(|r| r.s21)
        })
        .collect();
    let mut net = NetworkData::new(2, model.probe.port_z)?;
    let zero = Phasor::new(0.0, 0.0);
    for (f, s21) in sweep.frequencies().into_iter().zip(readings) {
        let s21 = s21?;
        net.push(f, vec![zero, s21, s21, zero])?;
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DEFAULT_EPS_GEOM;
    use crate::model::{db20, Spacing};

    fn uniform(h: Vec3) -> impl Fn(Vec3) -> Result<HVector> {
        move |_| Ok(HVector::from_real(h, Phasor::new(1.0, 0.0)))
    }

    fn probe_at(z: f64) -> LoopProbe {
        LoopProbe {
            center: Vec3::new(0.0, 0.0, z),
            ..LoopProbe::standard(Vec3::Y)
        }
    }

    #[test]
    fn flux_of_uniform_fields() {
        let p = probe_at(1.0);
        let par = loop_flux(&p, uniform(Vec3::Y), 8).unwrap();
        assert!((par.re - 1.6e-5).abs() < 1e-18 && par.im == 0.0);
        let perp = loop_flux(&p, uniform(Vec3::X + Vec3::Z), 8).unwrap();
        assert!(perp.norm() < 1e-20);
        assert!(loop_flux(&p, uniform(Vec3::Y), 1).is_err());
        assert!(loop_flux(&probe_at(1e-3), uniform(Vec3::Y), 4).is_err());
    }

    #[test]
    fn emf_and_port() {
        let emf = induced_emf(Phasor::new(1.6e-5, 0.0), 1e9);
        // 2π·1e9·4π·1e-7·1.6e-5
        let expected = 2.0 * std::f64::consts::PI * 1e9 * 4e-7 * std::f64::consts::PI * 1.6e-5;
        assert!((emf.norm() - expected).abs() < 1e-15);
        assert!((emf.norm() - 0.12633).abs() < 1e-5);
        assert!(emf.re.abs() < 1e-18 && emf.im < 0.0);
        let double = induced_emf(Phasor::new(1.6e-5, 0.0), 2e9);
        assert!((double.norm() / emf.norm() - 2.0).abs() < 1e-15);
        assert_eq!(induced_emf(Phasor::new(0.0, 0.0), 1e9).norm(), 0.0);

        let v = Phasor::new(0.2, 0.0);
        assert_eq!(
            port_voltage(v, PortLoading::MatchedHalving),
            Phasor::new(0.1, 0.0)
        );
        assert_eq!(port_voltage(v, PortLoading::OpenCircuit), v);
        assert_eq!(
            port_voltage(Phasor::new(0.0, 0.0), PortLoading::MatchedHalving).norm(),
            0.0
        );
    }

    #[test]
    fn s21_normalization() {
        let drive = DriveSpec::default();
        let s = synthesize_s21(Phasor::new(0.0707, 0.0), 50.0, &drive);
        assert!((s.norm() - 0.0707 / (50.0f64 * 1e-4).sqrt()).abs() < 1e-15);
        assert!(db20(s.norm(), 1.0).unwrap().abs() < 0.01);
        assert_eq!(
            synthesize_s21(Phasor::new(0.0, 0.0), 50.0, &drive).norm(),
            0.0
        );
        let half = synthesize_s21(Phasor::new(0.0707 / 2.0, 0.0), 50.0, &drive);
        let drop = db20(s.norm(), 1.0).unwrap() - db20(half.norm(), 1.0).unwrap();
        assert!((drop - 6.0206).abs() < 1e-4);
    }

    fn standard_setup() -> (PortWaveModel, TracePath, Substrate) {
        let s = Substrate::default();
        let model =
            PortWaveModel::new(LoopProbe::standard(Vec3::Y), PortLoading::MatchedHalving, 8)
                .unwrap();
        (model, TracePath::standard_line(&s), s)
    }

    #[test]
    fn quadrature_converges() {
        let (_, trace, s) = standard_setup();
        let sources = excite(&trace, 5e8, &DriveSpec::default(), &s, DEFAULT_EPS_GEOM).unwrap();
        // Tip 1 mm (= side/4) above the conductor.
        let probe = LoopProbe::standard(Vec3::Y).with_tip_at(Vec3::new(0.0, 0.0, s.h + 1e-3));
        let flux = |n| loop_flux(&probe, |p| sources.h_at(p), n).unwrap();
        let (f4, f8, f16, f32) = (flux(4), flux(8), flux(16), flux(32));
        assert!(((f16 - f32).norm() / f32.norm()) < 1e-3);
        assert!((f8 - f16).norm() < (f4 - f8).norm());
        assert!((f16 - f32).norm() <= (f8 - f16).norm());
    }

    #[test]
    fn transfer_rises_six_db_per_octave() {
        let (model, trace, s) = standard_setup();
        let sweep = FrequencySweep::new(1e8, 2e8, 2, Spacing::Linear).unwrap();
        let net = probe_transfer(
            &model,
            &trace,
            &s,
            1e-3,
            &sweep,
            &DriveSpec::default(),
            DEFAULT_EPS_GEOM,
        )
        .unwrap();
        let db = |k| db20(net.s21(k).unwrap().norm(), 1.0).unwrap();
        assert!((db(1) - db(0) - 6.02).abs() < 0.5);
        assert_eq!(net.s21(0), net.get(0, 1, 2));
    }

    #[test]
    fn transfer_is_drive_invariant() {
        let (model, trace, s) = standard_setup();
        let sweep = FrequencySweep::single(1e9).unwrap();
        let a = probe_transfer(
            &model,
            &trace,
            &s,
            1e-3,
            &sweep,
            &DriveSpec::default(),
            DEFAULT_EPS_GEOM,
        )
        .unwrap();
        let strong = DriveSpec::new(1e-2, 50.0).unwrap();
        let b =
            probe_transfer(&model, &trace, &s, 1e-3, &sweep, &strong, DEFAULT_EPS_GEOM).unwrap();
        assert_eq!(a.len(), 1);
        let (sa, sb) = (a.s21(0).unwrap(), b.s21(0).unwrap());
        assert!((sa - sb).norm() / sa.norm() < 1e-12);
    }
}
