//! Antenna-factor table CSV: `# key=value` header (kernel, d, h) then `freq_hz,cf_db` rows.

use std::fmt::Write as _;

use crate::calibration::{CfRow, CfTable, GeometryKernel};
use crate::error::{Error, Result};
use crate::io::{fmt_num, parse_num};

pub fn write_cf_csv(table: &CfTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# nfscan antenna factor");
    let _ = writeln!(out, "# kernel={}", table.kernel);
    let _ = writeln!(out, "# d_m={}", fmt_num(table.d));
    let _ = writeln!(out, "# h_m={}", fmt_num(table.h));
    let _ = writeln!(out, "freq_hz,cf_db");
    for r in table.rows() {
        let _ = writeln!(out, "{},{}", fmt_num(r.freq), fmt_num(r.cf_db));
    }
    out
}

pub fn parse_cf_csv(text: &str) -> Result<CfTable> {
    let mut kernel: Option<GeometryKernel> = None;
    let mut d = None;
    let mut h = None;
    let mut rows = Vec::new();
    let mut seen_columns = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(hdr) = t.strip_prefix('#') {
            let Some((k, v)) = hdr.split_once('=') else {
                continue;
            };
            let v = v.trim();
            let num =
                || parse_num(v).ok_or_else(|| Error::parse(line, format!("bad number `{v}`")));
            match k.trim() {
                "kernel" => {
                    kernel = Some(
                        v.parse()
                            .map_err(|e: Error| Error::parse(line, e.to_string()))?,
                    )
                }
                "d_m" => d = Some(num()?),
                "h_m" => h = Some(num()?),
                "sign_mode" => {}
                other => return Err(Error::parse(line, format!("unknown header key `{other}`"))),
            }
            continue;
        }
        if !seen_columns {
            if t.replace(' ', "") != "freq_hz,cf_db" {
                return Err(Error::parse(line, "expected column header `freq_hz,cf_db`"));
            }
            seen_columns = true;
            continue;
        }
        let cells: Vec<&str> = t.split(',').collect();
        if cells.len() != 2 {
            return Err(Error::parse(
                line,
                format!("{} columns, expected 2", cells.len()),
            ));
        }
        let freq = parse_num(cells[0]).ok_or_else(|| Error::parse(line, "bad frequency"))?;
        let cf_db = parse_num(cells[1]).ok_or_else(|| Error::parse(line, "bad cf value"))?;
        if let Some(prev) = rows.last().map(|r: &CfRow| r.freq) {
            if !(freq > prev) {
                return Err(Error::parse(line, "frequencies must strictly increase"));
            }
        }
        rows.push(CfRow { freq, cf_db });
    }
    let missing = |k: &str| Error::Format(format!("antenna-factor header is missing `{k}`"));
    CfTable::new(
        rows,
        kernel.ok_or_else(|| missing("kernel"))?,
        d.ok_or_else(|| missing("d_m"))?,
        h.ok_or_else(|| missing("h_m"))?,
    )
}
