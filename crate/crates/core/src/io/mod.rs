//! File formats: Touchstone v1, field-map / profile / antenna-factor CSV, binary PGM.

pub mod cf_csv;
pub mod fieldmap;
pub mod pgm;
pub mod touchstone;

pub use cf_csv::{parse_cf_csv, write_cf_csv};
pub use fieldmap::{
    parse_map_csv, write_map_csv, write_profile_csv, Axis, Component, FieldMap, MapValues, Profile,
    Quantity, ValueKind,
};
pub use pgm::render_pgm;
pub use touchstone::{parse_touchstone, write_touchstone, DataFormat, NetworkData, NetworkRow};

/// Shortest round-trip decimal; scientific notation outside `[1e-5, 1e16)`.
pub(crate) fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub(crate) fn parse_num(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}
