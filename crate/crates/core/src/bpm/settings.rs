use crate::error::{ensure_positive, invalid, Result};
use crate::field::Polarization;

/// Discretization and boundary parameters of one propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpmSettings {
    /// Longitudinal step (um).
    pub dz: f64,
    /// Reference index of the slowly varying envelope.
    pub n_ref: f64,
    /// Vacuum wavelength (um).
    pub lambda: f64,
    pub polarization: Polarization,
    /// Absorbing layer thickness on every side (um); zero disables it.
    pub pml_thickness: f64,
    /// Peak imaginary coordinate stretch of the absorbing layer.
    pub pml_strength: f64,
}

impl Default for BpmSettings {
    fn default() -> Self {
        Self {
            dz: 0.5,
            n_ref: 1.445,
            lambda: 1.55,
            polarization: Polarization::Te,
            pml_thickness: 3.0,
            pml_strength: 6.0,
        }
    }
}

impl BpmSettings {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("dz", self.dz)?;
        ensure_positive("n_ref", self.n_ref)?;
        ensure_positive("lambda", self.lambda)?;
        if !(self.pml_thickness.is_finite() && self.pml_thickness >= 0.0) {
            return Err(invalid("pml_thickness", format!("must be >= 0, got {}", self.pml_thickness)));
        }
        if !(self.pml_strength.is_finite() && self.pml_strength >= 0.0) {
            return Err(invalid("pml_strength", format!("must be >= 0, got {}", self.pml_strength)));
        }
        Ok(())
    }

    pub fn k0(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lambda
    }
}
