use num_complex::Complex64;

use crate::error::{ensure_positive, invalid, Result};
use crate::field::{FieldSlice, Polarization};
use crate::grid::Grid2D;

/// Elliptical Gaussian laser-diode field
/// `exp(-(x-x0)^2/wx^2 - (y-y0)^2/wy^2)` at unit power.
pub fn elliptical_gaussian_source(
    wx: f64,
    wy: f64,
    grid: &Grid2D,
    lambda: f64,
    polarization: Polarization,
    center: (f64, f64),
) -> Result<FieldSlice> {
    ensure_positive("wx", wx)?;
    ensure_positive("wy", wy)?;
    if wx < 2.0 * grid.dx {
        return Err(invalid("wx", format!("waist {wx} um is below two cells ({} um)", 2.0 * grid.dx)));
    }
    if wy < 2.0 * grid.dy {
        return Err(invalid("wy", format!("waist {wy} um is below two cells ({} um)", 2.0 * grid.dy)));
    }
    let (x0, y0) = center;
    FieldSlice::from_fn(*grid, lambda, polarization, |x, y| {
        let (u, v) = ((x - x0) / wx, (y - y0) / wy);
        Complex64::new((-u * u - v * v).exp(), 0.0)
    })?
    .normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> Grid2D {
        Grid2D::centered(200, 200, 0.05, 0.05, (0.0, 0.0)).unwrap()
    }

    #[test]
    fn circular_waists_are_symmetric() {
        let f = elliptical_gaussian_source(1.2, 1.2, &grid(), 1.55, Polarization::Te, (0.0, 0.0)).unwrap();
        let v = f.values();
        for j in 0..200 {
            for i in 0..200 {
                assert!((v[[j, i]].norm() - v[[i, j]].norm()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn second_moment_ratio_tracks_ellipticity() {
        let f = elliptical_gaussian_source(1.0, 0.5, &grid(), 1.55, Polarization::Scalar, (0.0, 0.0)).unwrap();
        let (sx, sy) = f.second_moments().unwrap();
        let ratio = (sx / sy).sqrt();
        assert!((ratio - 2.0).abs() < 0.02, "{ratio}");
        // Analytic second moment of |E|^2 is w^2 / 4.
        assert!((sx - 0.25).abs() < 1e-3 && (sy - 0.0625).abs() < 1e-3);
    }

    #[test]
    fn rejects_sub_cell_waists() {
        assert!(elliptical_gaussian_source(0.05, 1.0, &grid(), 1.55, Polarization::Scalar, (0.0, 0.0)).is_err());
        assert!(elliptical_gaussian_source(1.0, -1.0, &grid(), 1.55, Polarization::Scalar, (0.0, 0.0)).is_err());
    }

    proptest! {
        #[test]
        fn unit_power(wx in 0.2f64..2.0, wy in 0.2f64..2.0, cx in -1.0f64..1.0) {
            let f = elliptical_gaussian_source(wx, wy, &grid(), 1.55, Polarization::Scalar, (cx, 0.0)).unwrap();
            prop_assert!((f.power() - 1.0).abs() < 1e-10);
        }
    }
}
