//! Gridded field maps and their CSV form.
//!
//! A map file starts with `# key=value` header lines describing the grid,
//! frequency and value tags, followed by `ny` rows of `nx` comma-separated
//! values. Row `j` holds `y = y_min + j·dy`. Complex values are written as
//! `re:im`; dB values as plain numbers. Keys prefixed `meta.` carry free-form
//! metadata (calibration kernel, sign mode, provenance).

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io::{fmt_num, parse_num};
use crate::model::{db20, Phasor, ScanGrid, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Hx,
    Hy,
    Hz,
    Mag,
}

impl Component {
    /// Component sensed by a loop whose normal is a coordinate axis.
    pub fn from_axis(normal: Vec3) -> Component {
        if normal.x.abs() >= normal.y.abs() && normal.x.abs() >= normal.z.abs() {
            Component::Hx
        } else if normal.y.abs() >= normal.z.abs() {
            Component::Hy
        } else {
            Component::Hz
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Component::Hx => "hx",
            Component::Hy => "hy",
            Component::Hz => "hz",
            Component::Mag => "mag",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Component {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hx" => Ok(Component::Hx),
            "hy" => Ok(Component::Hy),
            "hz" => Ok(Component::Hz),
            "mag" => Ok(Component::Mag),
            _ => Err(Error::Format(format!("unknown component `{s}`"))),
        }
    }
}

/// Physical quantity held by a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// Magnetic field, A/m.
    MagneticField,
    /// Probe port voltage, V.
    PortVoltage,
    /// Transmission coefficient, unitless.
    Transmission,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::MagneticField => "h-field",
            Quantity::PortVoltage => "port-voltage",
            Quantity::Transmission => "s21",
        }
    }

    pub fn db_unit(self) -> &'static str {
        match self {
            Quantity::MagneticField => "dBA/m",
            Quantity::PortVoltage => "dBV",
            Quantity::Transmission => "dB",
        }
    }

    pub fn linear_unit(self) -> &'static str {
        match self {
            Quantity::MagneticField => "A/m",
            Quantity::PortVoltage => "V",
            Quantity::Transmission => "1",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h-field" => Ok(Quantity::MagneticField),
            "port-voltage" => Ok(Quantity::PortVoltage),
            "s21" => Ok(Quantity::Transmission),
            _ => Err(Error::Format(format!("unknown quantity `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Complex,
    Db,
}

impl ValueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::Complex => "complex",
            ValueKind::Db => "db",
        }
    }
}

impl FromStr for ValueKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex" => Ok(ValueKind::Complex),
            "db" => Ok(ValueKind::Db),
            _ => Err(Error::Format(format!("unknown value kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapValues {
    Complex(Vec<Phasor>),
    /// 20·log10 of the magnitude against the quantity's unit reference.
    Db(Vec<f64>),
}

impl MapValues {
    pub fn len(&self) -> usize {
        match self {
            MapValues::Complex(v) => v.len(),
            MapValues::Db(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            MapValues::Complex(_) => ValueKind::Complex,
            MapValues::Db(_) => ValueKind::Db,
        }
    }

    fn to_db(&self) -> Result<Vec<f64>> {
        match self {
            MapValues::Db(v) => Ok(v.clone()),
            MapValues::Complex(v) => v.iter().map(|z| db20(z.norm(), 1.0)).collect(),
        }
    }

    fn format_value(&self, k: usize) -> String {
        match self {
            MapValues::Db(v) => fmt_num(v[k]),
            MapValues::Complex(v) => format!("{}:{}", fmt_num(v[k].re), fmt_num(v[k].im)),
        }
    }
}

/// Values of one quantity over a scan grid at one frequency, stored row-major (y outer).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    pub grid: ScanGrid,
    pub freq: f64,
    pub component: Component,
    pub quantity: Quantity,
    values: MapValues,
    pub metadata: BTreeMap<String, String>,
}

impl FieldMap {
    pub fn new(
        grid: ScanGrid,
        freq: f64,
        component: Component,
        quantity: Quantity,
        values: MapValues,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Format(format!(
                "map has {} values for a {}x{} grid",
                values.len(),
                grid.nx(),
                grid.ny()
            )));
        }
        if !(freq >= 0.0) || !freq.is_finite() {
            return Err(Error::Format(format!("bad map frequency {freq}")));
        }
        let finite = match &values {
            MapValues::Db(v) => v.iter().all(|x| x.is_finite()),
            MapValues::Complex(v) => v.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        };
        if !finite {
            return Err(Error::Format("map values must be finite".into()));
        }
        Ok(FieldMap {
            grid,
            freq,
            component,
            quantity,
            values,
            metadata: BTreeMap::new(),
        })
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn values(&self) -> &MapValues {
        &self.values
    }

    pub fn kind(&self) -> ValueKind {
        self.values.kind()
    }

    pub fn db_values(&self) -> Result<&[f64]> {
        match &self.values {
            MapValues::Db(v) => Ok(v),
            MapValues::Complex(_) => Err(Error::Type(
                "expected a dB map, found complex values".into(),
            )),
        }
    }

    /// Magnitude in dB; fails on zero-magnitude points.
    pub fn to_db(&self) -> Result<FieldMap> {
        Ok(FieldMap {
            values: MapValues::Db(self.values.to_db()?),
            ..self.clone()
        })
    }

    pub fn unit(&self) -> &'static str {
        match self.kind() {
            ValueKind::Db => self.quantity.db_unit(),
            ValueKind::Complex => self.quantity.linear_unit(),
        }
    }
}

/// Values along one grid line.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub axis: Axis,
    /// Position of the line on the other axis (m).
    pub at: f64,
    pub freq: f64,
    pub component: Component,
    pub quantity: Quantity,
    pub coords: Vec<f64>,
    pub values: MapValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            _ => Err(Error::Format(format!("unknown axis `{s}`"))),
        }
    }
}

const MAP_TITLE: &str = "# nfscan field map";

pub fn write_map_csv(map: &FieldMap) -> String {
    let g = &map.grid;
    let mut out = String::new();
    let _ = writeln!(out, "{MAP_TITLE}");
    let header = [
        ("x_min_m", fmt_num(g.x_min)),
        ("x_max_m", fmt_num(g.x_max)),
        ("y_min_m", fmt_num(g.y_min)),
        ("y_max_m", fmt_num(g.y_max)),
        ("dx_m", fmt_num(g.dx)),
        ("dy_m", fmt_num(g.dy)),
        ("z_height_m", fmt_num(g.z_height)),
        ("nx", g.nx().to_string()),
        ("ny", g.ny().to_string()),
        ("freq_hz", fmt_num(map.freq)),
        ("component", map.component.to_string()),
        ("quantity", map.quantity.to_string()),
        ("value_kind", map.kind().as_str().to_string()),
        ("unit", map.unit().to_string()),
    ];
    for (k, v) in header {
        let _ = writeln!(out, "# {k}={v}");
    }
    for (k, v) in &map.metadata {
        let _ = writeln!(out, "# meta.{k}={v}");
    }
    for iy in 0..g.ny() {
        let row: Vec<String> = (0..g.nx())
            .map(|ix| map.values.format_value(g.index(ix, iy)))
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn parse_map_csv(text: &str) -> Result<FieldMap> {
    let mut header: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut metadata = BTreeMap::new();
    let mut body: Vec<(usize, &str)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if let Some(h) = trimmed.strip_prefix('#') {
            if !body.is_empty() {
                return Err(Error::parse(line, "header line after data rows"));
            }
            let Some((k, v)) = h.split_once('=') else {
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            if let Some(mk) = k.strip_prefix("meta.") {
                if mk.is_empty() {
                    return Err(Error::parse(line, "empty metadata key"));
                }
                metadata.insert(mk.to_string(), v.to_string());
                continue;
            }
            const KNOWN: [&str; 14] = [
                "x_min_m",
                "x_max_m",
                "y_min_m",
                "y_max_m",
                "dx_m",
                "dy_m",
                "z_height_m",
                "nx",
                "ny",
                "freq_hz",
                "component",
                "quantity",
                "value_kind",
                "unit",
            ];
            if !KNOWN.contains(&k) {
                return Err(Error::parse(line, format!("unknown header key `{k}`")));
            }
            if header
                .insert(k.to_string(), (line, v.to_string()))
                .is_some()
            {
                return Err(Error::parse(line, format!("duplicate header key `{k}`")));
            }
        } else if trimmed.is_empty() {
            continue;
        } else {
            body.push((line, trimmed));
        }
    }

    let get = |k: &str| -> Result<&(usize, String)> {
        header
            .get(k)
            .ok_or_else(|| Error::Format(format!("map header is missing `{k}`")))
    };
    let num = |k: &str| -> Result<f64> {
        let (line, v) = get(k)?;
        parse_num(v).ok_or_else(|| Error::parse(*line, format!("`{k}` is not a finite number")))
    };
    let count = |k: &str| -> Result<usize> {
        let (line, v) = get(k)?;
        v.parse()
            .map_err(|_| Error::parse(*line, format!("`{k}` is not a count")))
    };
    let tag = |k: &str| -> Result<(usize, &str)> { get(k).map(|(l, v)| (*l, v.as_str())) };

    let grid = ScanGrid::new(
        num("x_min_m")?,
        num("x_max_m")?,
        num("y_min_m")?,
        num("y_max_m")?,
        num("dx_m")?,
        num("dy_m")?,
        num("z_height_m")?,
    )?;
    let (nx, ny) = (count("nx")?, count("ny")?);
    if (nx, ny) != (grid.nx(), grid.ny()) {
        return Err(Error::Format(format!(
            "header declares {nx}x{ny} points but the extents give {}x{}",
            grid.nx(),
            grid.ny()
        )));
    }
    let freq = num("freq_hz")?;
    fn parse_tag<T: FromStr<Err = Error>>((line, v): (usize, &str)) -> Result<T> {
        v.parse()
            .map_err(|e: Error| Error::parse(line, e.to_string()))
    }
    let component: Component = parse_tag(tag("component")?)?;
    let quantity: Quantity = parse_tag(tag("quantity")?)?;
    let kind: ValueKind = parse_tag(tag("value_kind")?)?;
    if let Ok((line, unit)) = tag("unit") {
        let expected = match kind {
            ValueKind::Db => quantity.db_unit(),
            ValueKind::Complex => quantity.linear_unit(),
        };
        if unit != expected {
            return Err(Error::parse(
                line,
                format!("unit `{unit}` does not match `{expected}`"),
            ));
        }
    }

    if body.len() != ny {
        return Err(Error::Format(format!(
            "expected {ny} data rows, found {}",
            body.len()
        )));
    }
    let mut db = Vec::new();
    let mut cx = Vec::new();
    for (row, (line, text)) in body.iter().enumerate() {
        let cells: Vec<&str> = text.split(',').collect();
        if cells.len() != nx {
            return Err(Error::Parse {
                line: *line,
                reason: format!("row {row} has {} values, header says {nx}", cells.len()),
            });
        }
        for (col, cell) in cells.iter().enumerate() {
            let bad = || Error::parse(*line, format!("row {row} column {col}: bad value `{cell}`"));
            match kind {
                ValueKind::Db => db.push(parse_num(cell).ok_or_else(bad)?),
                ValueKind::Complex => {
                    let (re, im) = cell.split_once(':').ok_or_else(bad)?;
                    let re = parse_num(re).ok_or_else(bad)?;
                    let im = parse_num(im).ok_or_else(bad)?;
                    cx.push(Phasor::new(re, im));
                }
            }
        }
    }
    let values = match kind {
        ValueKind::Db => MapValues::Db(db),
        ValueKind::Complex => MapValues::Complex(cx),
    };
    let mut map = FieldMap::new(grid, freq, component, quantity, values)?;
    map.metadata = metadata;
    Ok(map)
}

pub fn write_profile_csv(profile: &Profile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# nfscan profile");
    let _ = writeln!(out, "# axis={}", profile.axis.as_str());
    let _ = writeln!(out, "# at_m={}", fmt_num(profile.at));
    let _ = writeln!(out, "# freq_hz={}", fmt_num(profile.freq));
    let _ = writeln!(out, "# component={}", profile.component);
    let _ = writeln!(out, "# quantity={}", profile.quantity);
    let _ = writeln!(out, "# value_kind={}", profile.values.kind().as_str());
    let _ = writeln!(out, "coord_m,value");
    for (k, c) in profile.coords.iter().enumerate() {
        let _ = writeln!(out, "{},{}", fmt_num(*c), profile.values.format_value(k));
    }
    out
}
