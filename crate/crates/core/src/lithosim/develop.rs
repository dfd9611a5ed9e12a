use ndarray::Array2;

use crate::error::{invalid, Error, Result};
use crate::geometry::ExposureSetup;
use crate::grid::Grid2D;

use super::aerial::IntensityMap;

/// Developed resist height map `h(x, y)` in um.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistProfile {
    grid: Grid2D,
    h: Array2<f64>,
    thickness: f64,
}

impl ResistProfile {
    pub fn new(grid: Grid2D, h: Array2<f64>, thickness: f64) -> Result<Self> {
        if h.dim() != grid.shape() {
            return Err(Error::GridMismatch(format!(
                "height array {:?} does not match grid {:?}",
                h.dim(),
                grid.shape()
            )));
        }
        if let Some(v) = h.iter().find(|v| !(v.is_finite() && **v >= 0.0 && **v <= thickness)) {
            return Err(invalid("h", format!("heights must lie in [0, {thickness}], found {v}")));
        }
        Ok(Self { grid, h, thickness })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn heights(&self) -> &Array2<f64> {
        &self.h
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn max_height(&self) -> f64 {
        self.h.iter().cloned().fold(0.0, f64::max)
    }

    /// The profile reflected about the grid centre along the y axis.
    pub fn mirrored_y(&self) -> ResistProfile {
        let mut h = self.h.clone();
        h.invert_axis(ndarray::Axis(0));
        Self {
            grid: self.grid,
            h: h.as_standard_layout().into_owned(),
            thickness: self.thickness,
        }
    }
}

/// Linear threshold model of a negative resist:
/// `h = t clamp((I T - E_th) / (E_cl - E_th), 0, 1)` with exposure time `T`.
pub fn develop(image: &IntensityMap, setup: &ExposureSetup, exposure_time: f64) -> Result<ResistProfile> {
    setup.validate()?;
    if !(exposure_time.is_finite() && exposure_time > 0.0) {
        return Err(invalid("exposure_time", format!("must be > 0, got {exposure_time}")));
    }
    let (eth, ecl, t) = (setup.dose_threshold, setup.dose_clear, setup.resist_thickness);
    let h = image
        .values()
        .mapv(|i| t * ((i * exposure_time - eth) / (ecl - eth)).clamp(0.0, 1.0));
    ResistProfile::new(*image.grid(), h, t)
}
