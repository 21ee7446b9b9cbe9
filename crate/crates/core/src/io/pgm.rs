use crate::error::{Error, Result};
use crate::io::FieldMap;

/// Grey level for `v` on a `[lo, hi]` dB scale, rounded half up.
pub fn pixel_level(v: f64, lo: f64, hi: f64) -> u8 {
    let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
    (255.0 * t + 0.5).floor() as u8
}

/// Binary P5 greymap of a dB map. The top image row is `y_max`.
pub fn render_pgm(map: &FieldMap, lo: f64, hi: f64) -> Result<Vec<u8>> {
    let values = map.db_values()?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Range(format!(
            "display range needs lo < hi, got [{lo}, {hi}]"
        )));
    }
    let g = &map.grid;
    let mut out = format!("P5\n{} {}\n255\n", g.nx(), g.ny()).into_bytes();
    out.reserve(g.len());
    for iy in (0..g.ny()).rev() {
        for ix in 0..g.nx() {
            out.push(pixel_level(values[g.index(ix, iy)], lo, hi));
        }
    }
    Ok(out)
}
