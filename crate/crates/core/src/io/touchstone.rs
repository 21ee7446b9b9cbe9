//! Touchstone v1 (`.s1p` / `.s2p`) reader and writer.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::Phasor;

/// Frequency-indexed S-parameters. `s` holds the n×n matrix row-major:
/// `s[i * n + j]` is `S(i+1)(j+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRow {
    pub freq: f64,
    pub s: Vec<Phasor>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkData {
    n_ports: usize,
    z_ref: f64,
    rows: Vec<NetworkRow>,
}

impl NetworkData {
    pub fn new(n_ports: usize, z_ref: f64) -> Result<Self> {
        if !(1..=2).contains(&n_ports) {
            return Err(Error::invalid(
                "network",
                format!("{n_ports} ports unsupported (1 or 2)"),
            ));
        }
        if !(z_ref > 0.0) || !z_ref.is_finite() {
            return Err(Error::invalid("network", "reference impedance must be > 0"));
        }
        Ok(NetworkData {
            n_ports,
            z_ref,
            rows: Vec::new(),
        })
    }

    pub fn push(&mut self, freq: f64, s: Vec<Phasor>) -> Result<()> {
        if !(freq >= 0.0) || !freq.is_finite() {
            return Err(Error::invalid("network", format!("bad frequency {freq}")));
        }
        if let Some(last) = self.rows.last() {
            if !(freq > last.freq) {
                return Err(Error::invalid(
                    "network",
                    format!(
                        "frequency {freq} Hz does not increase (previous {} Hz)",
                        last.freq
                    ),
                ));
            }
        }
        if s.len() != self.n_ports * self.n_ports {
            return Err(Error::invalid(
                "network",
                format!(
                    "expected {} entries, got {}",
                    self.n_ports * self.n_ports,
                    s.len()
                ),
            ));
        }
        self.rows.push(NetworkRow { freq, s });
        Ok(())
    }

    pub fn n_ports(&self) -> usize {
        self.n_ports
    }

    pub fn z_ref(&self) -> f64 {
        self.z_ref
    }

    pub fn rows(&self) -> &[NetworkRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.freq).collect()
    }

    /// `S(to)(from)` at row `k` (ports 1-based).
    pub fn get(&self, k: usize, to: usize, from: usize) -> Option<Phasor> {
        let n = self.n_ports;
        if to == 0 || from == 0 || to > n || from > n {
            return None;
        }
        self.rows.get(k).map(|r| r.s[(to - 1) * n + (from - 1)])
    }

    pub fn s21(&self, k: usize) -> Option<Phasor> {
        self.get(k, 2, 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FreqUnit {
    Hz,
    KHz,
    MHz,
    #[default]
    GHz,
}

impl FreqUnit {
    pub fn scale(self) -> f64 {
        match self {
            FreqUnit::Hz => 1.0,
            FreqUnit::KHz => 1e3,
            FreqUnit::MHz => 1e6,
            FreqUnit::GHz => 1e9,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            FreqUnit::Hz => "Hz",
            FreqUnit::KHz => "kHz",
            FreqUnit::MHz => "MHz",
            FreqUnit::GHz => "GHz",
        }
    }
}

/// Data-pair representation of a Touchstone file. Angles are in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DataFormat {
    Ri,
    #[default]
    Ma,
    Db,
}

impl DataFormat {
    pub fn token(self) -> &'static str {
        match self {
            DataFormat::Ri => "RI",
            DataFormat::Ma => "MA",
            DataFormat::Db => "DB",
        }
    }

    fn decode(self, a: f64, b: f64) -> Phasor {
        match self {
            DataFormat::Ri => Phasor::new(a, b),
            DataFormat::Ma => Phasor::from_polar(a, b.to_radians()),
            DataFormat::Db => Phasor::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }

    fn encode(self, z: Phasor) -> (f64, f64) {
        match self {
            DataFormat::Ri => (z.re, z.im),
            DataFormat::Ma => (z.norm(), z.arg().to_degrees()),
            DataFormat::Db => (20.0 * z.norm().log10(), z.arg().to_degrees()),
        }
    }
}

impl FromStr for DataFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RI" => Ok(DataFormat::Ri),
            "MA" => Ok(DataFormat::Ma),
            "DB" => Ok(DataFormat::Db),
            other => Err(Error::Format(format!(
                "unknown Touchstone format `{other}`"
            ))),
        }
    }
}

struct Options {
    unit: FreqUnit,
    format: DataFormat,
    z_ref: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            unit: FreqUnit::GHz,
            format: DataFormat::Ma,
            z_ref: 50.0,
        }
    }
}

fn parse_option_line(body: &str, line: usize) -> Result<Options> {
    let mut opts = Options::default();
    let mut tokens = body.split_whitespace();
    while let Some(tok) = tokens.next() {
        match tok.to_ascii_uppercase().as_str() {
            "HZ" => opts.unit = FreqUnit::Hz,
            "KHZ" => opts.unit = FreqUnit::KHz,
            "MHZ" => opts.unit = FreqUnit::MHz,
            "GHZ" => opts.unit = FreqUnit::GHz,
            "S" => {}
            "Y" | "Z" | "G" | "H" => {
                return Err(Error::parse(
                    line,
                    format!("parameter type `{tok}` unsupported, only S"),
                ))
            }
            "RI" => opts.format = DataFormat::Ri,
            "MA" => opts.format = DataFormat::Ma,
            "DB" => opts.format = DataFormat::Db,
            "R" => {
                let z = tokens
                    .next()
                    .ok_or_else(|| Error::parse(line, "missing reference impedance after R"))?;
                let z: f64 = z
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad reference impedance `{z}`")))?;
                if !(z > 0.0) || !z.is_finite() {
                    return Err(Error::parse(line, "reference impedance must be > 0"));
                }
                opts.z_ref = z;
            }
            _ => return Err(Error::parse(line, format!("unknown option token `{tok}`"))),
        }
    }
    Ok(opts)
}

/// Parses a Touchstone v1 file, inferring the port count from the first data row.
pub fn parse_touchstone(text: &str) -> Result<NetworkData> {
    parse_touchstone_ports(text, None)
}

/// Parses a Touchstone v1 file with an optional expected port count (1 or 2).
pub fn parse_touchstone_ports(text: &str, n_ports: Option<usize>) -> Result<NetworkData> {
    if let Some(n) = n_ports {
        if !(1..=2).contains(&n) {
            return Err(Error::Format(format!("{n}-port files are unsupported")));
        }
    }
    let mut opts: Option<Options> = None;
    let mut net: Option<NetworkData> = None;
    let mut ports = n_ports;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('!').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(body) = content.strip_prefix('#') {
            if opts.is_some() || net.as_ref().is_some_and(|n| !n.is_empty()) {
                return Err(Error::parse(
                    line,
                    "option line must appear once, before the data",
                ));
            }
            opts = Some(parse_option_line(body, line)?);
            continue;
        }
        let o = opts.get_or_insert_with(Options::default);

        let fields: Vec<&str> = content.split_whitespace().collect();
        let n = match ports {
            Some(n) => n,
            None => match fields.len() {
                3 => 1,
                9 => 2,
                k => {
                    return Err(Error::parse(
                        line,
                        format!("{k} columns; expected 3 (1-port) or 9 (2-port)"),
                    ))
                }
            },
        };
        ports = Some(n);
        let expected = 1 + 2 * n * n;
        if fields.len() != expected {
            return Err(Error::parse(
                line,
                format!("{} columns; a {n}-port row needs {expected}", fields.len()),
            ));
        }
        let mut nums = Vec::with_capacity(expected);
        for (col, f) in fields.iter().enumerate() {
            let v: f64 = f.parse().map_err(|_| {
                Error::parse(line, format!("column {}: `{f}` is not a number", col + 1))
            })?;
            let db_magnitude = o.format == DataFormat::Db && col % 2 == 1;
            let ok = v.is_finite() || (db_magnitude && v == f64::NEG_INFINITY);
            if !ok {
                return Err(Error::parse(
                    line,
                    format!("column {}: non-finite value", col + 1),
                ));
            }
            nums.push(v);
        }

        let freq = nums[0] * o.unit.scale();
        let pairs: Vec<Phasor> = nums[1..]
            .chunks(2)
            .map(|p| o.format.decode(p[0], p[1]))
            .collect();
        // v1 2-port order is S11 S21 S12 S22, i.e. column-major.
        let s = if n == 2 {
            vec![pairs[0], pairs[2], pairs[1], pairs[3]]
        } else {
            pairs
        };
        let z_ref = o.z_ref;
        let target = match net.as_mut() {
            Some(t) => t,
            None => net
                .insert(NetworkData::new(n, z_ref).map_err(|e| Error::parse(line, e.to_string()))?),
        };
        target
            .push(freq, s)
            .map_err(|e| Error::parse(line, e.to_string()))?;
    }

    match net {
        Some(n) => Ok(n),
        None => {
            let o = opts.unwrap_or_default();
            NetworkData::new(ports.unwrap_or(2), o.z_ref)
        }
    }
}

fn sci(v: f64) -> String {
    format!("{v:.8e}")
}

/// Writes a Touchstone v1 file with frequencies in GHz and 9 significant digits.
pub fn write_touchstone(net: &NetworkData, format: DataFormat) -> String {
    let unit = FreqUnit::GHz;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} S {} R {}",
        unit.token(),
        format.token(),
        net.z_ref
    );
    for row in &net.rows {
        let order: Vec<Phasor> = if net.n_ports == 2 {
            vec![row.s[0], row.s[2], row.s[1], row.s[3]]
        } else {
            row.s.clone()
        };
        let mut cols = vec![sci(row.freq / unit.scale())];
        for z in order {
            let (a, b) = format.encode(z);
            cols.push(sci(a));
            cols.push(sci(b));
        }
        let _ = writeln!(out, "{}", cols.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_ri_two_port() {
        let net = parse_touchstone("# GHz S RI R 50\n1.0 0 0 0.5 0 0 0 0 0\n").unwrap();
        assert_eq!(net.n_ports(), 2);
        assert_eq!(net.rows()[0].freq, 1e9);
        assert_eq!(net.s21(0).unwrap(), Phasor::new(0.5, 0.0));
        assert_eq!(net.get(0, 1, 2).unwrap(), Phasor::new(0.0, 0.0));
    }

    #[test]
    fn reads_db_format() {
        let net = parse_touchstone("# MHz S DB R 50\n100 -60 0 -40 0 -40 0 -60 0\n").unwrap();
        let s21 = net.s21(0).unwrap();
        assert!((s21.norm() - 0.01).abs() < 1e-15);
        assert_eq!(s21.arg(), 0.0);
        assert_eq!(net.rows()[0].freq, 1e8);
    }

    #[test]
    fn reads_ma_with_comments_and_case() {
        let text = "! probe data\n# hz s ma r 75 ! trailing\n\n1e9 0.5 90\n2e9 0.25 -90 ! c\n";
        let net = parse_touchstone(text).unwrap();
        assert_eq!(net.n_ports(), 1);
        assert_eq!(net.z_ref(), 75.0);
        let s = net.get(0, 1, 1).unwrap();
        assert!((s - Phasor::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let e =
            parse_touchstone("# GHz S RI R 50\n1 0 0 0 0 0 0 0 0\n2 0 0 0 0 0 0 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = parse_touchstone("# GHz S RI R 50\n2 0 0\n1 0 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        assert!(parse_touchstone("# THz S RI R 50\n1 0 0\n").is_err());
        assert!(parse_touchstone("# GHz Z RI R 50\n1 0 0\n").is_err());
        assert!(parse_touchstone("# GHz S XY R 50\n1 0 0\n").is_err());
        assert!(parse_touchstone("# GHz S RI R\n").is_err());
        assert!(parse_touchstone("# GHz S RI R 50\n1 0 nan\n").is_err());
        assert!(parse_touchstone("# GHz S RI R 50\n1 0 zero\n").is_err());
        assert!(parse_touchstone_ports("# GHz S RI R 50\n1 0 0\n", Some(2)).is_err());
    }

    #[test]
    fn empty_network_round_trips() {
        let net = NetworkData::new(2, 50.0).unwrap();
        let text = write_touchstone(&net, DataFormat::Ri);
        assert_eq!(text, "# GHz S RI R 50\n");
        let back = parse_touchstone(&text).unwrap();
        assert!(back.is_empty());
        assert_eq!(back.z_ref(), 50.0);
    }

    #[test]
    fn zero_magnitude_in_db() {
        let mut net = NetworkData::new(1, 50.0).unwrap();
        net.push(1e9, vec![Phasor::new(0.0, 0.0)]).unwrap();
        let text = write_touchstone(&net, DataFormat::Db);
        let back = parse_touchstone(&text).unwrap();
        assert_eq!(back.get(0, 1, 1).unwrap().norm(), 0.0);
    }
}
