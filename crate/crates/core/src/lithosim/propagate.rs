use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{ensure_positive, invalid, Error, Result};
use crate::fft::{fft_freqs, Fft2};
use crate::field::FieldSlice;

/// Options for the angular-spectrum transfer function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsmOptions {
    /// Largest propagating direction cosine kept; frequencies above
    /// `na_max / lambda` are discarded.
    pub na_max: f64,
    /// Drop spatial frequencies whose transfer-function chirp is undersampled
    /// by the window, removing light that would otherwise wrap around.
    pub band_limit: bool,
}

impl Default for AsmOptions {
    fn default() -> Self {
        Self {
            na_max: 1.0,
            band_limit: false,
        }
    }
}

impl AsmOptions {
    fn validate(&self) -> Result<()> {
        if !(self.na_max > 0.0 && self.na_max <= 1.0) {
            return Err(invalid("na_max", format!("must lie in (0, 1], got {}", self.na_max)));
        }
        Ok(())
    }

    pub(crate) fn check_spacing(&self, spacing: f64, lambda: f64) -> Result<()> {
        let limit = lambda / (2.0 * self.na_max);
        if spacing >= limit {
            return Err(Error::GridTooCoarse {
                spacing,
                limit,
                lambda,
            });
        }
        Ok(())
    }
}

/// Per-axis frequency cutoff for a window of `n` cells, or infinity.
fn axis_cutoff(n: usize, d: f64, distance: f64, lambda: f64, opts: &AsmOptions) -> f64 {
    opts.cutoff(n, d, distance, lambda)
}

impl AsmOptions {
    pub(crate) fn cutoff(&self, n: usize, d: f64, distance: f64, lambda: f64) -> f64 {
        if !self.band_limit {
            return f64::INFINITY;
        }
        let df = 1.0 / (n as f64 * d);
        1.0 / (lambda * ((2.0 * df * distance).powi(2) + 1.0).sqrt())
    }
}

/// `exp(i 2 pi d sqrt(1/lambda^2 - fx^2 - fy^2))`, decaying for evanescent
/// components.
fn transfer(f2: f64, distance: f64, lambda: f64, na_max: f64) -> Complex64 {
    let inv_l2 = 1.0 / (lambda * lambda);
    if f2 > na_max * na_max * inv_l2 && na_max < 1.0 {
        return Complex64::default();
    }
    let arg = inv_l2 - f2;
    if arg >= 0.0 {
        Complex64::from_polar(1.0, 2.0 * PI * distance * arg.sqrt())
    } else {
        Complex64::new((-2.0 * PI * distance * (-arg).sqrt()).exp(), 0.0)
    }
}

/// Free-space propagation of a scalar field by `distance` with the exact
/// angular-spectrum transfer function.
pub fn angular_spectrum_propagate(field: &FieldSlice, distance: f64, lambda: f64) -> Result<FieldSlice> {
    angular_spectrum_propagate_with(field, distance, lambda, &AsmOptions::default())
}

pub fn angular_spectrum_propagate_with(
    field: &FieldSlice,
    distance: f64,
    lambda: f64,
    opts: &AsmOptions,
) -> Result<FieldSlice> {
    ensure_positive("lambda", lambda)?;
    opts.validate()?;
    if !(distance.is_finite() && distance >= 0.0) {
        return Err(invalid("distance", format!("must be finite and >= 0, got {distance}")));
    }
    let g = *field.grid();
    opts.check_spacing(g.dx.max(g.dy), lambda)?;
    let mut a = field.values().to_owned();
    if distance > 0.0 {
        let plan = Fft2::new(g.ny, g.nx);
        plan.forward(&mut a);
        let fx = fft_freqs(g.nx, g.dx);
        let fy = fft_freqs(g.ny, g.dy);
        let cx = axis_cutoff(g.nx, g.dx, distance, lambda, opts);
        let cy = axis_cutoff(g.ny, g.dy, distance, lambda, opts);
        for ((j, i), v) in a.indexed_iter_mut() {
            if fx[i].abs() > cx || fy[j].abs() > cy {
                *v = Complex64::default();
            } else {
                *v *= transfer(fx[i] * fx[i] + fy[j] * fy[j], distance, lambda, opts.na_max);
            }
        }
        plan.inverse(&mut a);
    }
    FieldSlice::new(g, a, lambda, field.polarization())
}

/// Repeated 1-D propagation of rows of a fixed length.
pub(crate) struct RowPropagator {
    n: usize,
    dx: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    freqs: Vec<f64>,
}

impl RowPropagator {
    pub(crate) fn new(n: usize, dx: f64) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            dx,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            freqs: fft_freqs(n, dx),
        }
    }

    /// Propagates `row` in place.
    pub(crate) fn propagate(&self, row: &mut [Complex64], distance: f64, lambda: f64, opts: &AsmOptions) {
        if distance == 0.0 {
            return;
        }
        self.fwd.process(row);
        let c = axis_cutoff(self.n, self.dx, distance, lambda, opts);
        let s = 1.0 / self.n as f64;
        for (v, &f) in row.iter_mut().zip(&self.freqs) {
            *v = if f.abs() > c {
                Complex64::default()
            } else {
                *v * transfer(f * f, distance, lambda, opts.na_max) * s
            };
        }
        self.inv.process(row);
    }

    /// Gaussian smoothing of a real row with standard deviation `sigma`.
    pub(crate) fn smooth(&self, row: &mut [Complex64], sigma: f64) {
        self.fwd.process(row);
        let s = 1.0 / self.n as f64;
        for (v, &f) in row.iter_mut().zip(&self.freqs) {
            *v *= (-2.0 * (PI * sigma * f).powi(2)).exp() * s;
        }
        self.inv.process(row);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Polarization;
    use crate::grid::Grid2D;

    fn gaussian(grid: Grid2D, w0: f64, lambda: f64) -> FieldSlice {
        FieldSlice::from_fn(grid, lambda, Polarization::Scalar, |x, y| {
            Complex64::new((-(x * x + y * y) / (w0 * w0)).exp(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn zero_distance_is_identity() {
        let g = Grid2D::centered(64, 48, 0.1, 0.1, (0.0, 0.0)).unwrap();
        let f = gaussian(g, 1.0, 0.4);
        let out = angular_spectrum_propagate(&f, 0.0, 0.4).unwrap();
        for (a, b) in f.values().iter().zip(out.values()) {
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-300));
        }
    }

    #[test]
    fn gaussian_waist_grows_by_sqrt2_at_rayleigh_range() {
        let (w0, lambda) = (5.0, 0.4);
        let zr = PI * w0 * w0 / lambda;
        let g = Grid2D::centered(512, 512, 0.15, 0.15, (0.0, 0.0)).unwrap();
        let out = angular_spectrum_propagate(&gaussian(g, w0, lambda), zr, lambda).unwrap();
        let (wx, wy) = out.beam_radii().unwrap();
        let expect = w0 * 2f64.sqrt();
        assert!((wx / expect - 1.0).abs() < 0.01, "{wx}");
        assert!((wy / expect - 1.0).abs() < 0.01, "{wy}");
    }

    #[test]
    fn rejects_negative_distance_and_coarse_grid() {
        let g = Grid2D::centered(16, 16, 0.1, 0.1, (0.0, 0.0)).unwrap();
        let f = gaussian(g, 0.5, 0.4);
        assert!(angular_spectrum_propagate(&f, -1.0, 0.4).is_err());
        let coarse = Grid2D::centered(16, 16, 0.25, 0.25, (0.0, 0.0)).unwrap();
        assert!(matches!(
            angular_spectrum_propagate(&gaussian(coarse, 1.0, 0.4), 1.0, 0.4),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn row_propagator_matches_2d_for_y_invariant_fields() {
        let g = Grid2D::centered(256, 4, 0.1, 0.1, (0.0, 0.0)).unwrap();
        let f = FieldSlice::from_fn(g, 0.405, Polarization::Scalar, |x, _| {
            Complex64::new(if x.abs() <= 3.0 { 1.0 } else { 0.0 }, 0.0)
        })
        .unwrap();
        let out = angular_spectrum_propagate(&f, 40.0, 0.405).unwrap();
        let rp = RowPropagator::new(256, 0.1);
        let mut row: Vec<Complex64> = f.values().row(0).to_vec();
        rp.propagate(&mut row, 40.0, 0.405, &AsmOptions::default());
        for (a, b) in row.iter().zip(out.values().row(2)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    /// Fresnel integrals `(C(u), S(u))` by composite Simpson quadrature.
    fn fresnel_cs(u: f64) -> (f64, f64) {
        let n = 2 * ((u.abs() / 1e-3).ceil() as usize).max(1);
        let h = u / n as f64;
        let (mut c, mut s) = (0.0, 0.0);
        for k in 0..=n {
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            let t = k as f64 * h;
            let ph = 0.5 * PI * t * t;
            c += w * ph.cos();
            s += w * ph.sin();
        }
        (c * h / 3.0, s * h / 3.0)
    }

    #[test]
    fn straight_edge_matches_fresnel_integrals() {
        let (lambda, z, n) = (0.405, 1000.0, 65536);
        let g = Grid2D::centered(n, 2, 0.1, 0.1, (0.0, 0.0)).unwrap();
        let f = FieldSlice::from_fn(g, lambda, Polarization::Scalar, |x, _| {
            Complex64::new(if x > 0.0 && x < 0.05 * n as f64 { 1.0 } else { 0.0 }, 0.0)
        })
        .unwrap();
        let out = angular_spectrum_propagate(&f, z, lambda).unwrap();
        let scale = (2.0 / (lambda * z)).sqrt();
        let mut peak: f64 = 0.0;
        for i in 0..n {
            let x = g.x(i);
            let u = x * scale;
            if !(-2.0..=4.0).contains(&u) {
                continue;
            }
            let (c, s) = fresnel_cs(u);
            let expect = 0.5 * ((c + 0.5).powi(2) + (s + 0.5).powi(2));
            let got = out.values()[[0, i]].norm_sqr();
            assert!((got - expect).abs() < 0.01, "x={x} {got} vs {expect}");
            peak = peak.max(got);
        }
        assert!((peak - 1.37).abs() < 0.01, "{peak}");
    }
}
