//! JSON scan configuration.
//!
//! Lengths are in millimetres, frequencies in GHz and power in dBm; everything
//! is converted to SI on load. Unknown keys are rejected and every error
//! carries the path of the offending field.

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::calibration::{GeometryKernel, SignMode};
use crate::error::{Error, Result};
use crate::field::DEFAULT_EPS_GEOM;
use crate::model::{
    DriveSpec, FrequencySweep, LoopProbe, ScanGrid, Spacing, Substrate, Termination, TracePath,
    Vec3,
};
use crate::probe::{PortLoading, PortWaveModel};
use crate::scan::{Dut, Provenance, ScanSetup};

const MM: f64 = 1e-3;
const GHZ: f64 = 1e9;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SubstrateConfig {
    pub h_mm: f64,
    pub eps_r: f64,
    pub tan_d: f64,
    pub t_mm: f64,
    pub sigma_s_per_m: f64,
}

impl Default for SubstrateConfig {
    fn default() -> Self {
        let s = Substrate::fr4();
        SubstrateConfig {
            h_mm: s.h / MM,
            eps_r: s.eps_r,
            tan_d: s.tan_d,
            t_mm: s.t / MM,
            sigma_s_per_m: s.sigma,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    /// Polyline vertices `[x, y]` in the conductor plane.
    pub vertices_mm: Vec<[f64; 2]>,
    pub width_mm: f64,
    pub z0_ohm: f64,
    #[serde(default)]
    pub termination: Termination,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum NormalAxis {
    X,
    Y,
    Z,
}

impl NormalAxis {
    pub fn unit(self) -> Vec3 {
        match self {
            NormalAxis::X => Vec3::X,
            NormalAxis::Y => Vec3::Y,
            NormalAxis::Z => Vec3::Z,
        }
    }
}

fn default_quad_n() -> usize {
    8
}

fn default_port_z() -> f64 {
    50.0
}

fn default_probe_width() -> f64 {
    0.5
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub side_mm: f64,
    #[serde(default = "default_probe_width")]
    pub trace_width_mm: f64,
    /// Probe tip height above the conductor plane.
    pub height_mm: f64,
    pub normal: NormalAxis,
    #[serde(default)]
    pub loading: PortLoading,
    #[serde(default = "default_quad_n")]
    pub quad_n: usize,
    #[serde(default = "default_port_z")]
    pub port_z_ohm: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min_mm: f64,
    pub x_max_mm: f64,
    pub y_min_mm: f64,
    pub y_max_mm: f64,
    pub dx_mm: f64,
    pub dy_mm: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub f_min_ghz: f64,
    pub f_max_ghz: f64,
    pub n_points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub power_dbm: f64,
    #[serde(default = "default_port_z")]
    pub source_z_ohm: f64,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    #[serde(default)]
    pub kernel: GeometryKernel,
    #[serde(default)]
    pub sign_mode: SignMode,
    /// Defaults to the probe height.
    pub d_mm: Option<f64>,
    /// Defaults to the substrate thickness.
    pub h_mm: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default)]
    pub substrate: SubstrateConfig,
    pub trace: TraceConfig,
    pub probe: ProbeConfig,
    pub grid: GridConfig,
    pub sweep: SweepConfig,
    pub drive: DriveConfig,
    #[serde(default)]
    pub calibration: CalibrationConfig,
    pub eps_geom_m: Option<f64>,
}

/// Calibration parameters resolved to SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationParams {
    pub kernel: GeometryKernel,
    pub sign_mode: SignMode,
    pub d: f64,
    pub h: f64,
}

#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ScanConfig,
    pub setup: ScanSetup,
    pub calibration: CalibrationParams,
    /// Probe tip height above the conductor plane (m).
    pub probe_height: f64,
}

fn cfg_err(path: &str, e: impl std::fmt::Display) -> Error {
    Error::Config {
        path: path.to_string(),
        reason: e.to_string(),
    }
}

fn positive(path: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(cfg_err(path, format!("must be a positive number, got {v}")))
    }
}

pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl ScanConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            cfg_err(&path, e.into_inner())
        })
    }

    pub fn substrate(&self) -> Result<Substrate> {
        let s = &self.substrate;
        positive("substrate.h_mm", s.h_mm)?;
        if !(s.eps_r >= 1.0) {
            return Err(cfg_err("substrate.eps_r", "must be >= 1"));
        }
        Substrate::new(s.h_mm * MM, s.eps_r, s.tan_d, s.t_mm * MM, s.sigma_s_per_m)
            .map_err(|e| cfg_err("substrate", e))
    }

    pub fn trace(&self, substrate: &Substrate) -> Result<TracePath> {
        let t = &self.trace;
        positive("trace.width_mm", t.width_mm)?;
        positive("trace.z0_ohm", t.z0_ohm)?;
        let xy: Vec<(f64, f64)> = t
            .vertices_mm
            .iter()
            .map(|v| (v[0] * MM, v[1] * MM))
            .collect();
        TracePath::planar(&xy, substrate, t.width_mm * MM, t.z0_ohm, t.termination)
            .map_err(|e| cfg_err("trace.vertices_mm", e))
    }

    pub fn port_model(&self) -> Result<PortWaveModel> {
        let p = &self.probe;
        positive("probe.side_mm", p.side_mm)?;
        positive("probe.port_z_ohm", p.port_z_ohm)?;
        if p.quad_n < 2 {
            return Err(cfg_err("probe.quad_n", "must be >= 2"));
        }
        let probe = LoopProbe::new(
            Vec3::ZERO,
            p.normal.unit(),
            p.side_mm * MM,
            p.trace_width_mm * MM,
            p.port_z_ohm,
        )
        .map_err(|e| cfg_err("probe", e))?;
        PortWaveModel::new(probe, p.loading, p.quad_n).map_err(|e| cfg_err("probe", e))
    }

    pub fn grid(&self) -> Result<ScanGrid> {
        let g = &self.grid;
        positive("grid.dx_mm", g.dx_mm)?;
        positive("grid.dy_mm", g.dy_mm)?;
        let h = positive("probe.height_mm", self.probe.height_mm)?;
        ScanGrid::new(
            g.x_min_mm * MM,
            g.x_max_mm * MM,
            g.y_min_mm * MM,
            g.y_max_mm * MM,
            g.dx_mm * MM,
            g.dy_mm * MM,
            h * MM,
        )
        .map_err(|e| cfg_err("grid", e))
    }

    pub fn sweep(&self) -> Result<FrequencySweep> {
        let s = &self.sweep;
        if s.n_points == 0 {
            return Err(cfg_err("sweep.n_points", "sweep is empty"));
        }
        positive("sweep.f_min_ghz", s.f_min_ghz)?;
        positive("sweep.f_max_ghz", s.f_max_ghz)?;
        if s.f_max_ghz < s.f_min_ghz {
            return Err(cfg_err("sweep.f_max_ghz", "must be >= f_min_ghz"));
        }
        FrequencySweep::new(s.f_min_ghz * GHZ, s.f_max_ghz * GHZ, s.n_points, s.spacing)
            .map_err(|e| cfg_err("sweep", e))
    }

    pub fn drive(&self) -> Result<DriveSpec> {
        if !self.drive.power_dbm.is_finite() {
            return Err(cfg_err("drive.power_dbm", "must be finite"));
        }
        positive("drive.source_z_ohm", self.drive.source_z_ohm)?;
        DriveSpec::from_dbm(self.drive.power_dbm, self.drive.source_z_ohm)
            .map_err(|e| cfg_err("drive", e))
    }

    pub fn calibration(&self, substrate: &Substrate) -> Result<CalibrationParams> {
        let c = &self.calibration;
        let d = positive("calibration.d_mm", c.d_mm.unwrap_or(self.probe.height_mm))? * MM;
        let h = match c.h_mm {
            Some(v) => positive("calibration.h_mm", v)? * MM,
            None => substrate.h,
        };
        Ok(CalibrationParams {
            kernel: c.kernel,
            sign_mode: c.sign_mode,
            d,
            h,
        })
    }

    /// Validates every section and assembles the scan setup.
    pub fn load(text: &str) -> Result<LoadedConfig> {
        let config = ScanConfig::from_json(text)?;
        let substrate = config.substrate()?;
        let trace = config.trace(&substrate)?;
        let model = config.port_model()?;
        let grid = config.grid()?;
        let sweep = config.sweep()?;
        let drive = config.drive()?;
        let calibration = config.calibration(&substrate)?;
        let eps_geom = match config.eps_geom_m {
            Some(v) => positive("eps_geom_m", v)?,
            None => DEFAULT_EPS_GEOM,
        };
        let setup = ScanSetup {
            dut: Dut { trace, substrate },
            model,
            grid,
            sweep,
            drive,
            eps_geom,
            provenance: Provenance {
                config_digest: digest(text),
                kernel: calibration.kernel,
                sign_mode: calibration.sign_mode,
            },
        };
        Ok(LoadedConfig {
            probe_height: grid.z_height,
            config,
            setup,
            calibration,
        })
    }
}
