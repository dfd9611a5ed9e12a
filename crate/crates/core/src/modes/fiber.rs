use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure_positive, invalid, Error, Result};
use crate::field::{FieldSlice, Polarization};
use crate::grid::Grid2D;
use crate::special::{j0, j1, k0, k1};

use super::ModeProfile;

/// First zero of `J0`, the LP11 cutoff.
pub const SINGLE_MODE_CUTOFF: f64 = 2.404_825_557_695_773;

/// Normalized frequency `V = (pi d / lambda) sqrt(n1^2 - n2^2)`.
pub fn v_parameter(core_diameter: f64, n1: f64, n2: f64, lambda: f64) -> f64 {
    PI * core_diameter / lambda * (n1 * n1 - n2 * n2).sqrt()
}

/// Weakly guiding LP01 solution of a step-index fiber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lp01 {
    pub core_radius: f64,
    pub n1: f64,
    pub n2: f64,
    pub lambda: f64,
    pub v: f64,
    /// Core parameter `U = a k0 sqrt(n1^2 - n_eff^2)`.
    pub u: f64,
    /// Cladding parameter `W = a k0 sqrt(n_eff^2 - n2^2)`.
    pub w: f64,
    pub n_eff: f64,
}

impl Lp01 {
    /// Solves `U J1(U) / J0(U) = W K1(W) / K0(W)` with `U^2 + W^2 = V^2` by
    /// bisection.
    pub fn solve(core_diameter: f64, n1: f64, n2: f64, lambda: f64) -> Result<Self> {
        ensure_positive("core_diameter", core_diameter)?;
        ensure_positive("lambda", lambda)?;
        if !(n2.is_finite() && n2 >= 1.0) {
            return Err(invalid("n2", format!("cladding index must be >= 1, got {n2}")));
        }
        if !(n1 > n2) {
            return Err(invalid("n1", format!("core index {n1} must exceed cladding {n2}")));
        }
        let v = v_parameter(core_diameter, n1, n2, lambda);
        let f = |u: f64| {
            let w = (v * v - u * u).sqrt();
            u * j1(u) / j0(u) - w * k1(w) / k0(w)
        };
        let mut lo = 1e-9 * v;
        let mut hi = v.min(SINGLE_MODE_CUTOFF) * (1.0 - 1e-12);
        if !(f(lo) < 0.0 && f(hi) > 0.0) {
            return Err(Error::Cutoff(format!("no sign change in (0, {hi}) at V = {v}")));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        let u = 0.5 * (lo + hi);
        let w = (v * v - u * u).sqrt();
        let a = 0.5 * core_diameter;
        let k = 2.0 * PI / lambda;
        let n_eff = (n1 * n1 - (u / (a * k)).powi(2)).sqrt();
        Ok(Self {
            core_radius: a,
            n1,
            n2,
            lambda,
            v,
            u,
            w,
            n_eff,
        })
    }

    /// Field amplitude at radius `r`, continuous at the core boundary.
    pub fn amplitude(&self, r: f64) -> f64 {
        let s = r / self.core_radius;
        if s <= 1.0 {
            j0(self.u * s) / j0(self.u)
        } else {
            k0(self.w * s) / k0(self.w)
        }
    }

    /// Closed-form fraction of the modal power carried inside the core.
    pub fn core_power_fraction(&self) -> f64 {
        let core = 1.0 + (j1(self.u) / j0(self.u)).powi(2);
        let clad = (k1(self.w) / k0(self.w)).powi(2) - 1.0;
        core / (core + clad)
    }

    /// Marcuse's fit of the Gaussian mode-field radius,
    /// `w / a = 0.65 + 1.619 V^-3/2 + 2.879 V^-6`.
    pub fn marcuse_radius(&self) -> f64 {
        self.core_radius * (0.65 + 1.619 * self.v.powf(-1.5) + 2.879 * self.v.powi(-6))
    }

    /// Samples the mode on `grid` around `center` at unit power.
    pub fn sample(&self, grid: &Grid2D, center: (f64, f64), polarization: Polarization) -> Result<ModeProfile> {
        let field = FieldSlice::from_fn(*grid, self.lambda, polarization, |x, y| {
            Complex64::new(self.amplitude((x - center.0).hypot(y - center.1)), 0.0)
        })?
        .normalized()?;
        Ok(ModeProfile {
            field,
            n_eff: self.n_eff,
        })
    }
}

/// Analytic LP01 mode of a single-mode step-index fiber centred on the
/// origin of `grid`.
pub fn fiber_lp01_analytic(core_diameter: f64, n1: f64, n2: f64, lambda: f64, grid: &Grid2D) -> Result<ModeProfile> {
    let v = v_parameter(core_diameter, n1, n2, lambda);
    if v > SINGLE_MODE_CUTOFF {
        return Err(Error::Multimode { v });
    }
    Lp01::solve(core_diameter, n1, n2, lambda)?.sample(grid, (0.0, 0.0), Polarization::Scalar)
}

/// LP01 mode without the single-mode precondition, centred at `center`.
pub fn fiber_lp01_fundamental(
    core_diameter: f64,
    n1: f64,
    n2: f64,
    lambda: f64,
    grid: &Grid2D,
    center: (f64, f64),
    polarization: Polarization,
) -> Result<ModeProfile> {
    Lp01::solve(core_diameter, n1, n2, lambda)?.sample(grid, center, polarization)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smf_parameters() {
        let v = v_parameter(9.0, 1.450, 1.444, 1.55);
        assert!((v - 2.403).abs() < 1e-3, "{v}");
        assert!(v < SINGLE_MODE_CUTOFF);
        let m = Lp01::solve(9.0, 1.450, 1.444, 1.55).unwrap();
        assert!(m.n_eff > 1.444 && m.n_eff < 1.450);
        assert!((m.u * m.u + m.w * m.w - v * v).abs() < 1e-9);
    }

    #[test]
    fn dispersion_residual_vanishes() {
        let m = Lp01::solve(9.0, 1.450, 1.444, 1.55).unwrap();
        let lhs = m.u * j1(m.u) / j0(m.u);
        let rhs = m.w * k1(m.w) / k0(m.w);
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn marcuse_radius_near_four_and_a_half_microns() {
        let m = Lp01::solve(9.0, 1.450, 1.444, 1.55).unwrap();
        let w = m.marcuse_radius();
        assert!((w / 4.5 - 1.0).abs() < 0.15, "{w}");
    }

    #[test]
    fn multimode_is_rejected() {
        let g = Grid2D::centered(10, 10, 1.0, 1.0, (0.0, 0.0)).unwrap();
        assert!(matches!(
            fiber_lp01_analytic(9.0, 1.450, 1.444, 1.30, &g),
            Err(Error::Multimode { .. })
        ));
        assert!(fiber_lp01_fundamental(9.0, 1.450, 1.444, 1.30, &g, (0.0, 0.0), Polarization::Scalar).is_ok());
        assert!(Lp01::solve(9.0, 1.444, 1.450, 1.55).is_err());
    }

    #[test]
    fn sampled_core_power_matches_closed_form() {
        let g = Grid2D::centered(600, 600, 0.05, 0.05, (0.0, 0.0)).unwrap();
        let m = Lp01::solve(9.0, 1.450, 1.444, 1.55).unwrap();
        let mode = m.sample(&g, (0.0, 0.0), Polarization::Scalar).unwrap();
        let mut inside = 0.0;
        for ((j, i), v) in mode.field.values().indexed_iter() {
            if g.x(i).hypot(g.y(j)) <= 4.5 {
                inside += v.norm_sqr() * g.cell_area();
            }
        }
        let expect = m.core_power_fraction();
        assert!((inside / expect - 1.0).abs() < 0.01, "{inside} vs {expect}");
    }

    #[test]
    fn amplitude_is_continuous_at_the_core_edge() {
        let m = Lp01::solve(9.0, 1.450, 1.444, 1.55).unwrap();
        assert!((m.amplitude(4.5 - 1e-9) - m.amplitude(4.5 + 1e-9)).abs() < 1e-8);
        assert!((m.amplitude(0.0) - 1.0 / j0(m.u)).abs() < 1e-15);
    }
}
