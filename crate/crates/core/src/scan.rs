//! Scan orchestration: simulated raster scans, calibration of raw voltage maps,
//! profiles and min/max statistics.

use rayon::prelude::*;

use crate::calibration::{field_from_voltage, CfTable, GeometryKernel, SignMode};
use crate::error::{Error, Result};
use crate::field::{excite, HVector};
use crate::io::fieldmap::Axis;
use crate::io::{Component, FieldMap, MapValues, Profile, Quantity};
use crate::model::{
    DriveSpec, FrequencySweep, Phasor, ScanGrid, Substrate, TracePath, Vec3, GRID_TOL,
};
use crate::probe::{probe_reading, PortWaveModel, ProbeReading};

/// Device under test: the trace and the board it sits on.
#[derive(Debug, Clone, PartialEq)]
pub struct Dut {
    pub trace: TracePath,
    pub substrate: Substrate,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    /// SHA-256 of the configuration document, hex.
    pub config_digest: String,
    pub kernel: GeometryKernel,
    pub sign_mode: SignMode,
}

#[derive(Debug, Clone)]
pub struct ScanSetup {
    pub dut: Dut,
    pub model: PortWaveModel,
    pub grid: ScanGrid,
    pub sweep: FrequencySweep,
    pub drive: DriveSpec,
    pub eps_geom: f64,
    pub provenance: Provenance,
}

/// Maps produced at one frequency. All complex, sharing the scan grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyMaps {
    pub freq: f64,
    pub s21: FieldMap,
    pub v_port: FieldMap,
    /// Field component along the probe normal, evaluated at the scan point.
    pub h_truth: FieldMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub grid: ScanGrid,
    pub maps: Vec<FrequencyMaps>,
    pub provenance: Provenance,
}

impl ScanResult {
    pub fn at(&self, freq: f64) -> Option<&FrequencyMaps> {
        self.maps
            .iter()
            .find(|m| (m.freq - freq).abs() <= 1e-9 * freq.abs())
    }
}

/// World-space scan point for grid index `k`.
fn scan_point(grid: &ScanGrid, substrate: &Substrate, k: usize) -> Vec3 {
    let (ix, iy) = grid.indices(k);
    Vec3::new(grid.x(ix), grid.y(iy), substrate.h + grid.z_height)
}

/// Simulates the probe at every grid point and frequency.
///
/// Points are evaluated in parallel on the current rayon pool and assembled by
/// index, so the result does not depend on the schedule.
pub fn run_simulated_scan(setup: &ScanSetup) -> Result<ScanResult> {
    let grid = setup.grid;
    let normal = setup.model.probe.normal;
    let component = Component::from_axis(normal);
    let mut maps = Vec::new();

    for f in setup.sweep.frequencies() {
        let sources = excite(
            &setup.dut.trace,
            f,
            &setup.drive,
            &setup.dut.substrate,
            setup.eps_geom,
        )?;
        let points: Vec<Result<(ProbeReading, HVector)>> = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let tip = scan_point(&grid, &setup.dut.substrate, k);
                let wrap = |e: Error| {
                    let (ix, iy) = grid.indices(k);
                    Error::ScanPoint {
                        ix,
                        iy,
                        freq_hz: f,
                        source: Box::new(e),
                    }
                };
                let reading =
                    probe_reading(&setup.model, &sources, tip, f, &setup.drive).map_err(wrap)?;
                let h = sources.h_at(tip).map_err(wrap)?;
                Ok((reading, h))
            })
            .collect();

        let mut s21 = Vec::with_capacity(grid.len());
        let mut v = Vec::with_capacity(grid.len());
        let mut h = Vec::with_capacity(grid.len());
        for p in points {
            let (r, hv) = p?;
            s21.push(r.s21);
            v.push(r.v_port);
            h.push(hv.along(normal));
        }
        let make = |q, vals| {
            FieldMap::new(grid, f, component, q, MapValues::Complex(vals))
                .map(|m| m.with_metadata("config_digest", setup.provenance.config_digest.clone()))
        };
        maps.push(FrequencyMaps {
            freq: f,
            s21: make(Quantity::Transmission, s21)?,
            v_port: make(Quantity::PortVoltage, v)?,
            h_truth: make(Quantity::MagneticField, h)?,
        });
    }
    Ok(ScanResult {
        grid,
        maps,
        provenance: setup.provenance.clone(),
    })
}

/// Converts a port-voltage map into a field map with the antenna factor at `f`.
pub fn apply_calibration_to_scan(
    v_map: &FieldMap,
    cf: &CfTable,
    f: f64,
    sign_mode: SignMode,
) -> Result<FieldMap> {
    if v_map.quantity != Quantity::PortVoltage {
        return Err(Error::Type(format!(
            "calibration needs a port-voltage map, got {}",
            v_map.quantity
        )));
    }
    let cf_db = cf.cf_at(f)?;
    let v_db = v_map.to_db()?;
    let h: Vec<f64> = v_db
        .db_values()?
        .iter()
        .map(|&v| field_from_voltage(v, cf_db, sign_mode))
        .collect();
    let mut out = FieldMap::new(
        v_map.grid,
        f,
        v_map.component,
        Quantity::MagneticField,
        MapValues::Db(h),
    )?;
    out.metadata = v_map.metadata.clone();
    Ok(out
        .with_metadata("kernel", cf.kernel.as_str())
        .with_metadata("sign_mode", sign_mode.as_str())
        .with_metadata("cal_d_m", crate::io::fmt_num(cf.d))
        .with_metadata("cal_h_m", crate::io::fmt_num(cf.h))
        .with_metadata("cf_db", crate::io::fmt_num(cf_db)))
}

fn grid_line(min: f64, step: f64, count: usize, at: f64, name: &str) -> Result<usize> {
    let pos = (at - min) / step;
    let k = pos.round();
    if k >= 0.0 && (k as usize) < count && (min + k * step - at).abs() <= GRID_TOL {
        return Ok(k as usize);
    }
    let lo = pos.floor().clamp(0.0, (count - 1) as f64);
    let hi = pos.ceil().clamp(0.0, (count - 1) as f64);
    if lo == hi {
        return Err(Error::Range(format!(
            "{name} = {at} m is not on a grid line; nearest is {} m",
            min + lo * step
        )));
    }
    Err(Error::Range(format!(
        "{name} = {at} m is not on a grid line; nearest are {} m and {} m",
        min + lo * step,
        min + hi * step
    )))
}

/// Row or column of `map`: `axis` is the direction of travel, `at` the
/// position on the other axis.
pub fn extract_profile(map: &FieldMap, axis: Axis, at: f64) -> Result<Profile> {
    let g = &map.grid;
    let indices: Vec<usize> = match axis {
        Axis::Y => {
            let ix = grid_line(g.x_min, g.dx, g.nx(), at, "x")?;
            (0..g.ny()).map(|iy| g.index(ix, iy)).collect()
        }
        Axis::X => {
            let iy = grid_line(g.y_min, g.dy, g.ny(), at, "y")?;
            (0..g.nx()).map(|ix| g.index(ix, iy)).collect()
        }
    };
    let coords = indices
        .iter()
        .map(|&k| {
            let (ix, iy) = g.indices(k);
            match axis {
                Axis::Y => g.y(iy),
                Axis::X => g.x(ix),
            }
        })
        .collect();
    let values = match map.values() {
        MapValues::Db(v) => MapValues::Db(indices.iter().map(|&k| v[k]).collect()),
        MapValues::Complex(v) => {
            MapValues::Complex(indices.iter().map(|&k| v[k]).collect::<Vec<Phasor>>())
        }
    };
    Ok(Profile {
        axis,
        at,
        freq: map.freq,
        component: map.component,
        quantity: map.quantity,
        coords,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub ix: usize,
    pub iy: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapStats {
    pub min: Extremum,
    pub max: Extremum,
}

/// Extremes of a dB map; ties go to the lowest row-major index.
pub fn map_stats(map: &FieldMap) -> Result<MapStats> {
    let v = map.db_values()?;
    let g = &map.grid;
    let (mut kmin, mut kmax) = (0, 0);
    for (k, &x) in v.iter().enumerate() {
        if x < v[kmin] {
            kmin = k;
        }
        if x > v[kmax] {
            kmax = k;
        }
    }
    let ext = |k: usize| {
        let (ix, iy) = g.indices(k);
        Extremum {
            value: v[k],
            ix,
            iy,
            x: g.x(ix),
            y: g.y(iy),
        }
    };
    Ok(MapStats {
        min: ext(kmin),
        max: ext(kmax),
    })
}
