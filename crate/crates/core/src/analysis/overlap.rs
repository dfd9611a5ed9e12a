use crate::error::{Error, Result};
use crate::field::FieldSlice;

/// Power coupling `|<a, b>|^2 / (<a, a> <b, b>)` between two fields on the
/// same grid.
pub fn overlap_efficiency(a: &FieldSlice, b: &FieldSlice) -> Result<f64> {
    let ab = a.inner(b)?;
    let (pa, pb) = (a.power(), b.power());
    if !(pa > 0.0 && pb > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok((ab.norm_sqr() / (pa * pb)).min(1.0))
}

/// Loss in dB of a power transmission `eta`. Non-positive transmission is
/// total loss and maps to `+inf`.
pub fn loss_db(eta: f64) -> f64 {
    if eta > 0.0 {
        0.0 - 10.0 * eta.log10()
    } else {
        f64::INFINITY
    }
}
