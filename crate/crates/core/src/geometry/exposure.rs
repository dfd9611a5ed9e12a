use crate::error::{ensure_positive, invalid, Result};

/// One proximity print: base gap, mask tilt, exposure wavelength, resist
/// thickness and the clear-field-normalized threshold/clearing doses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExposureSetup {
    /// Base printing gap at the short side of the pattern (um).
    pub gap0: f64,
    /// Inclined-mask tilt (degrees).
    pub tilt_deg: f64,
    /// Exposure wavelength (um).
    pub lambda_uv: f64,
    /// Dose at which the developed height reaches the full resist thickness.
    pub dose_clear: f64,
    /// Dose below which negative resist develops away completely.
    pub dose_threshold: f64,
    /// Resist thickness (um).
    pub resist_thickness: f64,
}

impl Default for ExposureSetup {
    fn default() -> Self {
        Self {
            gap0: 500.0,
            tilt_deg: 10.0,
            lambda_uv: 0.405,
            dose_clear: 0.7,
            dose_threshold: 0.3,
            resist_thickness: 35.0,
        }
    }
}

impl ExposureSetup {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap0.is_finite() && self.gap0 >= 0.0) {
            return Err(invalid("gap0", format!("must be >= 0, got {}", self.gap0)));
        }
        if !(self.tilt_deg.is_finite() && (0.0..90.0).contains(&self.tilt_deg)) {
            return Err(invalid(
                "tilt_deg",
                format!("must lie in [0, 90), got {}", self.tilt_deg),
            ));
        }
        ensure_positive("lambda_uv", self.lambda_uv)?;
        ensure_positive("resist_thickness", self.resist_thickness)?;
        ensure_positive("dose_threshold", self.dose_threshold)?;
        if !(self.dose_threshold < self.dose_clear) || !self.dose_clear.is_finite() {
            return Err(invalid(
                "dose_clear",
                format!(
                    "need dose_threshold < dose_clear, got {} / {}",
                    self.dose_threshold, self.dose_clear
                ),
            ));
        }
        Ok(())
    }

    pub fn tilt_rad(&self) -> f64 {
        self.tilt_deg.to_radians()
    }

    /// Resist-to-mask distance under the inclined mask at arclength `y`
    /// along the mask: `g(y) = gap0 + y sin θ`.
    pub fn local_gap(&self, y: f64) -> f64 {
        self.gap0 + y * self.tilt_rad().sin()
    }

    /// Resist-plane coordinate of mask arclength `y`.
    pub fn project(&self, y: f64) -> f64 {
        y * self.tilt_rad().cos()
    }

    /// Mask arclength above resist-plane coordinate `y_resist`.
    pub fn unproject(&self, y_resist: f64) -> f64 {
        y_resist / self.tilt_rad().cos()
    }

    /// Same print with the tilt and base gap replaced.
    pub fn with_tilt_gap(&self, tilt_deg: f64, gap0: f64) -> Self {
        Self {
            tilt_deg,
            gap0,
            ..*self
        }
    }
}
