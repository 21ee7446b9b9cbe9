//! Probe antenna factor (CF = H/V) and field extraction in the IEC 61967-1 form.
//!
//! ```text
//! CF_dB(f) = 20·log10[G(d, h)] − S21_dB(f) − 34
//! H_dB(f)  = CF_dB(f) + V_dB(f)
//! ```
//!
//! `G` is the filament-over-ground geometry factor with `d` the probe to
//! conductor distance and `h` the substrate thickness. Two forms are kept:
//! the printed `d/(π·h·(h+2d))` and the image-theory `h/(π·d·(d+2h))`,
//! which differ by a swap of `d` and `h`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::NetworkData;
use crate::model::db20;

/// Constant term of the antenna-factor formula (dB).
pub const CF_CONSTANT_DB: f64 = 34.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKernel {
    /// `d/(π·h·(h+2d))`, the printed calibration formula.
    #[default]
    Paper,
    /// `h/(π·d·(d+2h))`, the infinite line over ground.
    ImageTheory,
}

impl GeometryKernel {
    pub fn as_str(self) -> &'static str {
        match self {
            GeometryKernel::Paper => "paper",
            GeometryKernel::ImageTheory => "image-theory",
        }
    }

    /// Linear geometry factor (1/m).
    pub fn factor(self, d: f64, h: f64) -> f64 {
        match self {
            GeometryKernel::Paper => d / (PI * h * (h + 2.0 * d)),
            GeometryKernel::ImageTheory => h / (PI * d * (d + 2.0 * h)),
        }
    }
}

impl fmt::Display for GeometryKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeometryKernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(GeometryKernel::Paper),
            "image-theory" => Ok(GeometryKernel::ImageTheory),
            _ => Err(Error::Format(format!(
                "unknown kernel `{s}` (paper | image-theory)"
            ))),
        }
    }
}

/// How the measured voltage enters the field extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignMode {
    /// `H_dB = CF_dB + V_dB`, the dB form of `CF = H/V`.
    #[default]
    Eq1Consistent,
    /// `H_dB = CF_dB − V_dB`.
    Eq3Printed,
}

impl SignMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SignMode::Eq1Consistent => "eq1-consistent",
            SignMode::Eq3Printed => "eq3-printed",
        }
    }
}

impl fmt::Display for SignMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SignMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq1-consistent" => Ok(SignMode::Eq1Consistent),
            "eq3-printed" => Ok(SignMode::Eq3Printed),
            _ => Err(Error::Format(format!(
                "unknown sign mode `{s}` (eq1-consistent | eq3-printed)"
            ))),
        }
    }
}

pub fn geometry_term_db(d: f64, h: f64, kernel: GeometryKernel) -> Result<f64> {
    if !(d > 0.0) || !(h > 0.0) {
        return Err(Error::Range(format!(
            "need d > 0 and h > 0, got d={d}, h={h}"
        )));
    }
    db20(kernel.factor(d, h), 1.0)
}

pub fn cf_from_s21(s21_db: f64, d: f64, h: f64, kernel: GeometryKernel) -> Result<f64> {
    Ok(geometry_term_db(d, h, kernel)? - s21_db - CF_CONSTANT_DB)
}

pub fn field_from_voltage(v_db: f64, cf_db: f64, sign_mode: SignMode) -> f64 {
    match sign_mode {
        SignMode::Eq1Consistent => cf_db + v_db,
        SignMode::Eq3Printed => cf_db - v_db,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfRow {
    pub freq: f64,
    /// dB(1/m).
    pub cf_db: f64,
}

/// Antenna factor versus frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct CfTable {
    rows: Vec<CfRow>,
    pub kernel: GeometryKernel,
    /// Probe to conductor distance (m).
    pub d: f64,
    /// Substrate thickness (m).
    pub h: f64,
}

impl CfTable {
    pub fn new(rows: Vec<CfRow>, kernel: GeometryKernel, d: f64, h: f64) -> Result<Self> {
        for (k, r) in rows.iter().enumerate() {
            if !r.cf_db.is_finite() || !(r.freq > 0.0) || !r.freq.is_finite() {
                return Err(Error::invalid(
                    "cf table",
                    format!("row {k} is not finite/positive"),
                ));
            }
        }
        if let Some(k) = rows.windows(2).position(|w| !(w[1].freq > w[0].freq)) {
            return Err(Error::invalid(
                "cf table",
                format!("frequencies not strictly increasing at row {}", k + 1),
            ));
        }
        if !(d > 0.0) || !(h > 0.0) {
            return Err(Error::invalid("cf table", "d and h must be > 0"));
        }
        Ok(CfTable { rows, kernel, d, h })
    }

    pub fn rows(&self) -> &[CfRow] {
        &self.rows
    }

    /// CF at `f`, linear in (log f, dB) between rows. No extrapolation.
    pub fn cf_at(&self, f: f64) -> Result<f64> {
        let (Some(first), Some(last)) = (self.rows.first(), self.rows.last()) else {
            return Err(Error::Range("antenna-factor table is empty".into()));
        };
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs();
        if let Some(r) = self.rows.iter().find(|r| close(r.freq, f)) {
            return Ok(r.cf_db);
        }
        if !(f > first.freq && f < last.freq) {
            return Err(Error::Range(format!(
                "{f} Hz is outside the table span [{}, {}] Hz",
                first.freq, last.freq
            )));
        }
        let k = self.rows.partition_point(|r| r.freq < f);
        let (a, b) = (self.rows[k - 1], self.rows[k]);
        let t = (f / a.freq).ln() / (b.freq / a.freq).ln();
        Ok(a.cf_db + t * (b.cf_db - a.cf_db))
    }
}

/// Antenna factor for every row of a measured (or synthetic) probe network.
pub fn calibrate(
    probe_s21: &NetworkData,
    d: f64,
    h: f64,
    kernel: GeometryKernel,
) -> Result<CfTable> {
    if probe_s21.n_ports() < 2 {
        return Err(Error::Format(
            "probe network has no S21 entry (1-port data)".into(),
        ));
    }
    let mut rows = Vec::with_capacity(probe_s21.len());
    for (k, row) in probe_s21.rows().iter().enumerate() {
        let s21 = probe_s21
            .s21(k)
            .ok_or_else(|| Error::Format(format!("row {k} ({} Hz) has no S21", row.freq)))?;
        let s21_db = db20(s21.norm(), 1.0).map_err(|_| {
            Error::Format(format!(
                "row {k} ({} Hz): S21 is zero, antenna factor undefined",
                row.freq
            ))
        })?;
        rows.push(CfRow {
            freq: row.freq,
            cf_db: cf_from_s21(s21_db, d, h, kernel)?,
        });
    }
    CfTable::new(rows, kernel, d, h)
}
