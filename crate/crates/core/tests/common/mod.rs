//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use nfscan::io::{
    write_map_csv, write_touchstone, Component, DataFormat, FieldMap, MapValues, NetworkData,
    Quantity,
};
use nfscan::{Phasor, ScanGrid};
use rand::Rng;

pub const TABLE2_JSON: &str = include_str!("../../../cli/examples/table2.json");
pub const TABLE3_JSON: &str = include_str!("../../../cli/examples/table3.json");

/// Standard-line config (`table2.json`) retuned to a single frequency.
pub fn table2_at_ghz(f_ghz: f64) -> String {
    TABLE2_JSON.replace(
        r#""f_min_ghz": 2, "f_max_ghz": 2"#,
        &format!(r#""f_min_ghz": {f_ghz}, "f_max_ghz": {f_ghz}"#),
    )
}

pub fn sample_network() -> NetworkData {
    let mut net = NetworkData::new(2, 50.0).unwrap();
    for k in 0..6 {
        let f = 1e8 * (k + 1) as f64;
        let s: Vec<Phasor> = (0..4)
            .map(|j| {
                Phasor::from_polar(
                    0.01 + 0.1 * j as f64 + 1e-3 * k as f64,
                    0.3 * (j + k) as f64 - 1.0,
                )
            })
            .collect();
        net.push(f, s).unwrap();
    }
    net
}

pub fn sample_touchstone() -> String {
    write_touchstone(&sample_network(), DataFormat::Ri)
}

pub fn sample_map() -> FieldMap {
    let g = ScanGrid::new(-1e-3, 1e-3, -1.5e-3, 1.5e-3, 0.5e-3, 0.5e-3, 1e-3).unwrap();
    let vals = (0..g.len())
        .map(|k| -40.0 + 0.37 * k as f64 - 1e-3 * (k * k) as f64)
        .collect();
    FieldMap::new(
        g,
        2e9,
        Component::Hy,
        Quantity::MagneticField,
        MapValues::Db(vals),
    )
    .unwrap()
    .with_metadata("config_digest", "abc123")
}

pub fn sample_map_csv() -> String {
    write_map_csv(&sample_map())
}

fn data_lines(text: &str) -> Vec<usize> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#') && !t.starts_with('!')
        })
        .map(|(i, _)| i)
        .collect()
}

fn rebuild(lines: Vec<String>) -> String {
    let mut s = lines.join("\n");
    s.push('\n');
    s
}

fn pick<'a, R: Rng>(rng: &mut R, v: &'a [usize]) -> &'a usize {
    &v[rng.random_range(0..v.len())]
}

/// A Touchstone document broken in one of several ways that a parser must reject.
pub fn mutate_touchstone<R: Rng>(text: &str, rng: &mut R) -> String {
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let data = data_lines(text);
    let opt = lines
        .iter()
        .position(|l| l.trim_start().starts_with('#'))
        .unwrap();
    match rng.random_range(0..9) {
        0 => {
            let i = *pick(rng, &data);
            let mut toks: Vec<String> = lines[i].split_whitespace().map(str::to_string).collect();
            let t = rng.random_range(0..toks.len());
            toks[t] = ["abc", "1.0.0", "--3", "0x10", "1e", "nan", "inf"][rng.random_range(0..7)]
                .to_string();
            lines[i] = toks.join(" ");
        }
        1 => {
            let i = *pick(rng, &data);
            let mut toks: Vec<&str> = lines[i].split_whitespace().collect();
            let t = rng.random_range(1..toks.len());
            toks.remove(t);
            lines[i] = toks.join(" ");
        }
        2 => {
            let i = *pick(rng, &data);
            lines[i].push_str(" 0.5");
        }
        3 => {
            let k = rng.random_range(1..data.len());
            lines.swap(data[k - 1], data[k]);
        }
        4 => {
            let i = *pick(rng, &data);
            let dup = lines[i].clone();
            lines.insert(i + 1, dup);
        }
        5 => {
            let bad = ["PHz", "Hertz", "kGHz"][rng.random_range(0..3)];
            lines[opt] = lines[opt].replace("GHz", bad);
        }
        6 => {
            let bad = ["XY", "DBM", "RE"][rng.random_range(0..3)];
            lines[opt] = lines[opt].replace(" RI ", &format!(" {bad} "));
        }
        7 => {
            let dup = lines[opt].clone();
            let i = *pick(rng, &data);
            lines.insert(i + 1, dup);
        }
        _ => {
            let r = ["-50", "0", "abc"][rng.random_range(0..3)];
            lines[opt] = lines[opt].replace("R 50", &format!("R {r}"));
        }
    }
    rebuild(lines)
}

/// A map CSV broken in one of several ways that a parser must reject.
pub fn mutate_map_csv<R: Rng>(text: &str, rng: &mut R) -> String {
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let data = data_lines(text);
    let header = |lines: &[String], key: &str| {
        lines
            .iter()
            .position(|l| l.starts_with(&format!("# {key}=")))
            .unwrap()
    };
    match rng.random_range(0..10) {
        0 => {
            let i = *pick(rng, &data);
            let mut cells: Vec<String> = lines[i].split(',').map(str::to_string).collect();
            let c = rng.random_range(0..cells.len());
            cells[c] =
                ["x", "", "1..2", "nan", "-inf", "1e999"][rng.random_range(0..6)].to_string();
            lines[i] = cells.join(",");
        }
        1 => {
            let i = *pick(rng, &data);
            let mut cells: Vec<&str> = lines[i].split(',').collect();
            cells.pop();
            lines[i] = cells.join(",");
        }
        2 => {
            let i = *pick(rng, &data);
            lines[i].push_str(",1.0");
        }
        3 => {
            let i = *pick(rng, &data);
            lines.remove(i);
        }
        4 => {
            let i = *pick(rng, &data);
            let dup = lines[i].clone();
            lines.insert(i, dup);
        }
        5 => {
            let i = header(&lines, "nx");
            lines[i] = "# nx=4".into();
        }
        6 => {
            let i = header(&lines, "unit");
            lines[i] =
                ["# unit=dBV", "# unit=A/m", "# unit=furlongs"][rng.random_range(0..3)].into();
        }
        7 => {
            let i = header(&lines, "freq_hz");
            lines.insert(i + 1, "# colour=blue".into());
        }
        8 => {
            let i = header(&lines, "dx_m");
            let dup = lines[i].clone();
            lines.insert(i, dup);
        }
        _ => {
            let key =
                ["component", "quantity", "value_kind", "x_min_m", "ny"][rng.random_range(0..5)];
            let i = header(&lines, key);
            lines.remove(i);
        }
    }
    rebuild(lines)
}
