use thiserror::Error;

/// Errors raised by the simulation kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("grid too coarse: spacing {spacing} um must be below {limit} um at wavelength {lambda} um")]
    GridTooCoarse { spacing: f64, limit: f64, lambda: f64 },

    #[error("fiber is multimode: V = {v:.4} exceeds 2.405")]
    Multimode { v: f64 },

    #[error("no LP01 root in the guided range: {0}")]
    Cutoff(String),

    #[error("no guided mode: n_eff {n_eff:.8} does not exceed boundary index {boundary:.8}")]
    NoGuidedMode { n_eff: f64, boundary: f64 },

    #[error("mode solver not converged after {iterations} iterations (last relative change {change:e})")]
    NotConverged { iterations: usize, change: f64 },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("no ridge found: peak height {peak:.4} um is below the noise floor {floor:.4} um")]
    NoRidge { peak: f64, floor: f64 },

    #[error("degenerate fit: ridge spans {cells} cells, at least {min} required")]
    DegenerateFit { cells: usize, min: usize },

    #[error("non-finite field detected at z = {z} um")]
    Instability { z: f64 },

    #[error("{percent:.1}% of the launched power was absorbed by z = {z} um")]
    ExcessiveAbsorption { percent: f64, z: f64 },

    #[error("zero-norm field")]
    ZeroNorm,

    #[error("PML overlaps the guiding core: {0}")]
    PmlOverlapsCore(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Returns an error unless `value` is finite and strictly positive.
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {value}")))
    }
}
