use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{ensure_positive, invalid, Error, Result};
use crate::field::{FieldSlice, Polarization};
use crate::geometry::IndexMap;
use crate::linalg::{bicgstab, dot, norm, pcg, thomas, DirichletPoisson};

use super::operator::Transverse;
use super::ModeProfile;

/// Iteration controls of the shifted inverse iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSolverOptions {
    /// Relative change of the eigenvalue estimate that ends the iteration.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative residual of each inner linear solve.
    pub inner_tol: f64,
    pub inner_max_iter: usize,
    /// Reject modes whose index does not exceed the boundary index. When
    /// off, the fundamental eigenmode of the closed window is returned even
    /// below cutoff.
    pub require_guided: bool,
}

impl Default for ModeSolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 500,
            inner_tol: 1e-12,
            inner_max_iter: 2000,
            require_guided: true,
        }
    }
}

/// Fundamental guided mode of `index` by shifted inverse iteration with
/// shift `(n_guess k0)^2`; `n_guess` defaults to the largest index.
pub fn solve_mode_fd(
    index: &IndexMap,
    lambda: f64,
    polarization: Polarization,
    n_guess: Option<f64>,
) -> Result<ModeProfile> {
    solve_mode_fd_with(index, lambda, polarization, n_guess, &ModeSolverOptions::default())
}

pub fn solve_mode_fd_with(
    index: &IndexMap,
    lambda: f64,
    polarization: Polarization,
    n_guess: Option<f64>,
    opts: &ModeSolverOptions,
) -> Result<ModeProfile> {
    let mut modes = solve_modes_fd(index, lambda, polarization, n_guess, 1, opts)?;
    Ok(modes.remove(0))
}

/// The `count` highest-index guided modes, found one after another with the
/// previous ones deflated. More than one mode requires the symmetric
/// scalar operator.
pub fn solve_modes_fd(
    index: &IndexMap,
    lambda: f64,
    polarization: Polarization,
    n_guess: Option<f64>,
    count: usize,
    opts: &ModeSolverOptions,
) -> Result<Vec<ModeProfile>> {
    eigenmodes(index, lambda, polarization, n_guess, count, opts, opts.require_guided)
}

/// Inverse iteration proper; `guided_only` enforces `n_eff > n_boundary`.
fn eigenmodes(
    index: &IndexMap,
    lambda: f64,
    polarization: Polarization,
    n_guess: Option<f64>,
    count: usize,
    opts: &ModeSolverOptions,
    guided_only: bool,
) -> Result<Vec<ModeProfile>> {
    ensure_positive("lambda", lambda)?;
    if count == 0 {
        return Err(invalid("count", "at least one mode must be requested"));
    }
    if count > 1 && polarization != Polarization::Scalar {
        return Err(invalid("count", "deflated higher modes need the scalar operator"));
    }
    let g = *index.grid();
    let op = Transverse::new(index, lambda, polarization);
    let k0 = 2.0 * std::f64::consts::PI / lambda;
    let n_max = index.max();
    let n_bnd = index.boundary_max();
    let guess = n_guess.unwrap_or(n_max);
    ensure_positive("n_guess", guess)?;
    let shift = (guess * k0).powi(2);
    let definite = guess >= n_max && op.is_symmetric();
    let tau = (shift - (k0 * n_bnd).powi(2)).max(0.0);
    let pre = DirichletPoisson::new(g.nx, g.ny, g.dx, g.dy, tau);

    let len = g.len();
    let start: Vec<f64> = index
        .values()
        .iter()
        .map(|n| (n * n - n_bnd * n_bnd).max(0.0) + 1e-3 * (n_max * n_max - n_bnd * n_bnd).max(1e-6))
        .collect();
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut out = Vec::new();
    for _ in 0..count {
        let mut x = start.clone();
        deflate(&mut x, &found);
        let n0 = norm(&x);
        scale(&mut x, 1.0 / n0);
        let mut ax = vec![0.0; len];
        let rq = |x: &[f64], ax: &mut Vec<f64>| {
            op.apply_shifted(0.0, x, ax);
            -dot(x, ax)
        };
        let mut mu = rq(&x, &mut ax);
        let mut y = vec![0.0; len];
        let mut change = f64::INFINITY;
        let mut converged = false;
        for _ in 0..opts.max_iter {
            // Warm start from the dominant-eigenvector estimate.
            let gap = shift - mu;
            let s = if gap.abs() > 1e-30 { 1.0 / gap } else { 1.0 };
            for (yi, xi) in y.iter_mut().zip(&x) {
                *yi = s * xi;
            }
            let apply = |u: &[f64], o: &mut [f64]| op.apply_shifted(shift, u, o);
            let precond = |r: &[f64], z: &mut [f64]| pre.solve(r, z);
            let solved = if definite {
                pcg(apply, precond, &x, &mut y, opts.inner_tol, opts.inner_max_iter)
            } else {
                bicgstab(apply, precond, &x, &mut y, opts.inner_tol, opts.inner_max_iter)
            };
            if let Err(e) = solved {
                if definite {
                    return Err(e);
                }
                // The shifted operator may be indefinite; retry from the top.
                for (yi, xi) in y.iter_mut().zip(&x) {
                    *yi = s * xi;
                }
                bicgstab(apply, precond, &x, &mut y, opts.inner_tol * 10.0, opts.inner_max_iter * 2)?;
            }
            deflate(&mut y, &found);
            let ny = norm(&y);
            if !(ny > 0.0 && ny.is_finite()) {
                return Err(Error::LinearSolve("inverse iteration produced a zero vector".into()));
            }
            scale(&mut y, 1.0 / ny);
            std::mem::swap(&mut x, &mut y);
            let mu_new = rq(&x, &mut ax);
            change = ((mu_new - mu) / mu_new).abs();
            mu = mu_new;
            if change < opts.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NotConverged {
                iterations: opts.max_iter,
                change,
            });
        }
        let n_eff = mu.max(0.0).sqrt() / k0;
        if guided_only && n_eff <= n_bnd {
            return Err(Error::NoGuidedMode {
                n_eff,
                boundary: n_bnd,
            });
        }
        out.push(to_mode(&x, index, lambda, polarization, n_eff)?);
        found.push(x);
    }
    Ok(out)
}

fn scale(x: &mut [f64], s: f64) {
    x.iter_mut().for_each(|v| *v *= s);
}

fn deflate(x: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(x, b);
        for (xi, bi) in x.iter_mut().zip(b) {
            *xi -= c * bi;
        }
    }
}

fn to_mode(x: &[f64], index: &IndexMap, lambda: f64, polarization: Polarization, n_eff: f64) -> Result<ModeProfile> {
    let g = *index.grid();
    let peak = x.iter().cloned().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
    let sign = if peak < 0.0 { -1.0 } else { 1.0 };
    let values = Array2::from_shape_fn(g.shape(), |(j, i)| Complex64::new(sign * x[j * g.nx + i], 0.0));
    let field = FieldSlice::new(g, values, lambda, polarization)?.normalized()?;
    Ok(ModeProfile { field, n_eff })
}

/// Largest-index mode of a 1-D profile `n` sampled at spacing `dx`,
/// Dirichlet outside. Returns `(n_eff, field)` with unit `sum |E|^2 dx`.
/// TM applies the interface-continuity stencil; TE and Scalar share the
/// plain second difference.
pub fn solve_slab_mode(n: &[f64], dx: f64, lambda: f64, polarization: Polarization) -> Result<(f64, Vec<f64>)> {
    ensure_positive("dx", dx)?;
    ensure_positive("lambda", lambda)?;
    let len = n.len();
    if len < 3 {
        return Err(invalid("n", "profile needs at least 3 samples"));
    }
    let k0 = 2.0 * std::f64::consts::PI / lambda;
    let n2: Vec<f64> = n.iter().map(|v| v * v).collect();
    let n_max = n.iter().cloned().fold(f64::MIN, f64::max);
    let n_bnd = n[0].max(n[len - 1]);
    let shift = (k0 * n_max).powi(2);
    let s = 1.0 / (dx * dx);
    let tm = polarization == Polarization::Tm;
    // (shift - L) as a tridiagonal matrix.
    let mut lo = vec![0.0; len];
    let mut di = vec![0.0; len];
    let mut up = vec![0.0; len];
    for k in 0..len {
        let (a, b, c) = if tm {
            let cc = n2[k];
            let l = if k > 0 { n2[k - 1] } else { cc };
            let r = if k + 1 < len { n2[k + 1] } else { cc };
            (2.0 * l / (cc + l), -(2.0 * cc / (cc + l) + 2.0 * cc / (cc + r)), 2.0 * r / (cc + r))
        } else {
            (1.0, -2.0, 1.0)
        };
        lo[k] = -a * s;
        di[k] = shift - b * s - k0 * k0 * n2[k];
        up[k] = -c * s;
    }
    let apply = |x: &[f64]| -> Vec<f64> {
        (0..len)
            .map(|k| {
                let mut v = di[k] * x[k];
                if k > 0 {
                    v += lo[k] * x[k - 1];
                }
                if k + 1 < len {
                    v += up[k] * x[k + 1];
                }
                shift * x[k] - v
            })
            .collect()
    };
    let mut x: Vec<f64> = n2.iter().map(|v| v - n_bnd * n_bnd + 1e-6).collect();
    let nx0 = norm(&x);
    scale(&mut x, 1.0 / nx0);
    let mut mu = dot(&x, &apply(&x));
    let mut scratch = vec![0.0; len];
    let mut converged = false;
    let mut change = f64::INFINITY;
    for _ in 0..500 {
        let mut y = x.clone();
        thomas(&lo, &di, &up, &mut y, &mut scratch);
        let ny = norm(&y);
        if !(ny > 0.0 && ny.is_finite()) {
            return Err(Error::LinearSolve("slab inverse iteration failed".into()));
        }
        scale(&mut y, 1.0 / ny);
        x = y;
        let mu_new = dot(&x, &apply(&x));
        change = ((mu_new - mu) / mu_new).abs();
        mu = mu_new;
        if change < 1e-14 {
            converged = true;
            break;
        }
    }
    if !converged && change > 1e-12 {
        return Err(Error::NotConverged { iterations: 500, change });
    }
    let n_eff = mu.max(0.0).sqrt() / k0;
    if n_eff <= n_bnd {
        return Err(Error::NoGuidedMode {
            n_eff,
            boundary: n_bnd,
        });
    }
    let peak = x.iter().cloned().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
    let sgn = peak.signum() / (dot(&x, &x) * dx).sqrt();
    scale(&mut x, sgn);
    Ok((n_eff, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{fiber_index_map, frustum_index_map, uniform_index_map, FrustumGeometry, IndexMap, StaticIndex};
    use crate::grid::Grid2D;

    /// Symmetric-slab TE0 root of `tan(kappa d / 2) = gamma / kappa` by bisection.
    fn slab_oracle(n1: f64, n2: f64, d: f64, lambda: f64) -> f64 {
        let k0 = 2.0 * std::f64::consts::PI / lambda;
        let f = |n: f64| {
            let kappa = k0 * (n1 * n1 - n * n).sqrt();
            let gamma = k0 * (n * n - n2 * n2).sqrt();
            (kappa * d / 2.0).tan() - gamma / kappa
        };
        let (mut lo, mut hi) = (n2 + 1e-12, n1 - 1e-12);
        // Restrict to the first branch, kappa d / 2 < pi / 2.
        let n_branch = (n1 * n1 - (std::f64::consts::PI / (d * k0)).powi(2)).max(n2 * n2).sqrt();
        lo = lo.max(n_branch + 1e-12);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn slab_matches_dispersion_root() {
        let (n1, n2, d, lambda) = (1.455, 1.445, 6.0, 1.55);
        let dx = 0.01;
        let half = 20.0;
        let count = (2.0 * half / dx) as usize;
        let n: Vec<f64> = (0..count)
            .map(|k| {
                let x = -half + (k as f64 + 0.5) * dx;
                if x.abs() <= d / 2.0 {
                    n1
                } else {
                    n2
                }
            })
            .collect();
        let (n_eff, field) = solve_slab_mode(&n, dx, lambda, Polarization::Te).unwrap();
        let expect = slab_oracle(n1, n2, d, lambda);
        assert!((n_eff - expect).abs() < 1e-5, "{n_eff} vs {expect}");
        assert!(((field.iter().map(|v| v * v).sum::<f64>() * dx) - 1.0).abs() < 1e-12);
    }

    fn small_grid(nx: usize, ny: usize, d: f64, center: (f64, f64)) -> Grid2D {
        Grid2D::centered(nx, ny, d, d, center).unwrap()
    }

    #[test]
    fn uniform_map_has_no_guided_mode() {
        let map = uniform_index_map(&small_grid(40, 40, 0.25, (0.0, 0.0)), 1.45).unwrap();
        assert!(matches!(
            solve_mode_fd(&map, 1.55, Polarization::Scalar, None),
            Err(Error::NoGuidedMode { .. })
        ));
    }

    #[test]
    fn fiber_neff_matches_the_analytic_root() {
        let lp = super::super::Lp01::solve(9.0, 1.45, 1.444, 1.55).unwrap();
        let map = fiber_index_map(9.0, 1.45, 1.444, &small_grid(120, 120, 0.2, (0.0, 0.0))).unwrap();
        let m = solve_mode_fd(&map, 1.55, Polarization::Scalar, None).unwrap();
        assert!(m.n_eff > 1.444 && m.n_eff < 1.45);
        assert!((m.n_eff - lp.n_eff).abs() < 1e-4, "{} vs {}", m.n_eff, lp.n_eff);
    }

    #[test]
    fn refinement_converges_at_second_order() {
        // Slab core in x inside a Dirichlet box of height h in y: the exact
        // propagation constant is beta_slab^2 - (pi / h)^2.
        let (n1, n2, d, lambda, h) = (1.455, 1.445, 6.0, 1.55, 8.0);
        let k0 = 2.0 * std::f64::consts::PI / lambda;
        let slab = slab_oracle(n1, n2, d, lambda);
        let exact = ((k0 * slab).powi(2) - (std::f64::consts::PI / h).powi(2)).sqrt() / k0;
        let mut errs = Vec::new();
        for step in [0.4, 0.2, 0.1] {
            let nx = (30.0 / step) as usize;
            let ny = (h / step).round() as usize - 1;
            let g = Grid2D::new(nx, ny, step, step, (-15.0 + 0.5 * step, step)).unwrap();
            let n = Array2::from_shape_fn(g.shape(), |(_, i)| if g.x(i).abs() < d / 2.0 { n1 } else { n2 });
            let map = IndexMap::new(g, 0.0, n).unwrap();
            // The core meets the box walls, so bypass the guided-mode check.
            let m = eigenmodes(&map, lambda, Polarization::Scalar, None, 1, &ModeSolverOptions::default(), false)
                .unwrap()
                .remove(0);
            errs.push((m.n_eff - exact).abs());
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio > 3.0 && ratio < 5.0, "{errs:?}");
        }
    }

    #[test]
    fn field_is_unit_power_with_positive_peak() {
        let g = small_grid(60, 60, 0.25, (0.0, 2.0));
        let geom = FrustumGeometry::straight(4.0, 3.0, 10.0, (1.48, 1.445, 1.445)).unwrap();
        let map = frustum_index_map(&geom, 0.0, &g).unwrap();
        for pol in [Polarization::Scalar, Polarization::Te, Polarization::Tm] {
            let m = solve_mode_fd(&map, 1.55, pol, None).unwrap();
            assert!((m.field.power() - 1.0).abs() < 1e-12);
            let peak = m.field.values().iter().max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap()).unwrap();
            assert!(peak.re > 0.0 && peak.im == 0.0);
            assert_eq!(m.field.polarization(), pol);
        }
        let _ = StaticIndex(map);
    }

    #[test]
    fn distinct_modes_are_orthogonal() {
        let g = small_grid(64, 48, 0.25, (0.0, 2.0));
        let geom = FrustumGeometry::straight(8.0, 3.0, 10.0, (1.50, 1.445, 1.445)).unwrap();
        let map = frustum_index_map(&geom, 0.0, &g).unwrap();
        let modes = solve_modes_fd(&map, 1.55, Polarization::Scalar, None, 2, &ModeSolverOptions::default()).unwrap();
        assert!(modes[0].n_eff > modes[1].n_eff);
        let ip = modes[0].field.inner(&modes[1].field).unwrap();
        assert!(ip.norm() < 1e-6, "{ip}");
    }

    #[test]
    fn translation_by_whole_cells_is_invisible() {
        let g = small_grid(64, 64, 0.2, (0.0, 0.0));
        let map = fiber_index_map(3.0, 1.6, 1.45, &g).unwrap();
        let moved = map.shifted(3, -2, 1.45).unwrap();
        let a = solve_mode_fd(&map, 1.55, Polarization::Scalar, None).unwrap();
        let b = solve_mode_fd(&moved, 1.55, Polarization::Scalar, None).unwrap();
        assert!((a.n_eff - b.n_eff).abs() < 1e-10, "{} {}", a.n_eff, b.n_eff);
        let (av, bv) = (a.field.values(), b.field.values());
        let mut worst = 0.0f64;
        for j in 10..54 {
            for i in 10..54 {
                worst = worst.max((av[[j, i]] - bv[[j - 2, i + 3]]).norm());
            }
        }
        let peak = av.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(worst < 1e-6 * peak, "{worst}");
    }

    #[test]
    fn weak_contrast_polarizations_agree() {
        let g = small_grid(60, 60, 0.25, (0.0, 2.5));
        let geom = FrustumGeometry::straight(5.0, 5.0, 10.0, (1.4451, 1.445, 1.445)).unwrap();
        let map = frustum_index_map(&geom, 0.0, &g).unwrap();
        let s = solve_mode_fd(&map, 1.55, Polarization::Scalar, None);
        // Extremely weak guides may be cut off at this domain size; compare when guided.
        if let Ok(s) = s {
            for pol in [Polarization::Te, Polarization::Tm] {
                let m = solve_mode_fd(&map, 1.55, pol, None).unwrap();
                assert!((m.n_eff - s.n_eff).abs() < 1e-3);
            }
        }
    }
}
