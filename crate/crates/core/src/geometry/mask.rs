use ndarray::Array2;

use crate::error::{ensure_positive, invalid, Result};
use crate::grid::Grid2D;

/// Binary trapezoidal aperture. The short parallel side lies on `y = 0`, the
/// long one on `y = altitude`, symmetric about `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskPattern {
    w_short: f64,
    w_long: f64,
    altitude: f64,
}

/// Builds the trapezoid aperture, rejecting non-positive or inverted sides.
pub fn trapezoid_mask(w_short: f64, w_long: f64, altitude: f64) -> Result<MaskPattern> {
    ensure_positive("w_short", w_short)?;
    ensure_positive("w_long", w_long)?;
    ensure_positive("altitude", altitude)?;
    if w_short > w_long {
        return Err(invalid(
            "w_short",
            format!("short side {w_short} um exceeds long side {w_long} um"),
        ));
    }
    Ok(MaskPattern {
        w_short,
        w_long,
        altitude,
    })
}

impl MaskPattern {
    pub fn w_short(&self) -> f64 {
        self.w_short
    }

    pub fn w_long(&self) -> f64 {
        self.w_long
    }

    pub fn altitude(&self) -> f64 {
        self.altitude
    }

    /// Aperture width at axial position `y` (linear between the parallel sides).
    pub fn width_at(&self, y: f64) -> f64 {
        self.w_short + (self.w_long - self.w_short) * y / self.altitude
    }

    pub fn transmission(&self, x: f64, y: f64) -> f64 {
        if (0.0..=self.altitude).contains(&y) && x.abs() <= 0.5 * self.width_at(y) {
            1.0
        } else {
            0.0
        }
    }

    /// Open fraction of the lateral interval `[x - dx/2, x + dx/2]` at axial
    /// position `y`.
    pub fn coverage(&self, x: f64, y: f64, dx: f64) -> f64 {
        if !(0.0..=self.altitude).contains(&y) {
            return 0.0;
        }
        let half = 0.5 * self.width_at(y);
        let open = (x + 0.5 * dx).min(half) - (x - 0.5 * dx).max(-half);
        (open / dx).clamp(0.0, 1.0)
    }

    pub fn area(&self) -> f64 {
        0.5 * (self.w_short + self.w_long) * self.altitude
    }

    /// Cell-centre rasterisation onto `grid`.
    pub fn rasterize(&self, grid: &Grid2D) -> Array2<f64> {
        Array2::from_shape_fn(grid.shape(), |(j, i)| {
            self.transmission(grid.x(i), grid.y(j))
        })
    }
}
