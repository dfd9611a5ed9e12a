//! Tridiagonal, Krylov and fast-Poisson solvers shared by the mode solver
//! and the propagator.

use std::ops::{Add, Div, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Dst1;

/// Solves `lo[i] x[i-1] + di[i] x[i] + up[i] x[i+1] = rhs[i]` in place of
/// `rhs`; `lo[0]` and `up[n-1]` are ignored. `scratch` needs `n` entries.
pub fn thomas<T>(lo: &[T], di: &[T], up: &[T], rhs: &mut [T], scratch: &mut [T])
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T>,
{
    let n = rhs.len();
    let mut beta = di[0];
    rhs[0] = rhs[0] / beta;
    for i in 1..n {
        scratch[i] = up[i - 1] / beta;
        beta = di[i] - lo[i] * scratch[i];
        rhs[i] = (rhs[i] - lo[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] = rhs[i] - scratch[i + 1] * rhs[i + 1];
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Fast solver for `(tau - D2) u = f` on an `nx` by `ny` grid with zero
/// Dirichlet values outside, `D2` being the 5-point Laplacian.
pub struct DirichletPoisson {
    nx: usize,
    ny: usize,
    tau: f64,
    ex: Vec<f64>,
    ey: Vec<f64>,
    dst_x: Dst1,
    dst_y: Dst1,
}

impl DirichletPoisson {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, tau: f64) -> Self {
        let eig = |n: usize, d: f64| -> Vec<f64> {
            (1..=n)
                .map(|k| (2.0 - 2.0 * (std::f64::consts::PI * k as f64 / (n + 1) as f64).cos()) / (d * d))
                .collect()
        };
        Self {
            nx,
            ny,
            tau,
            ex: eig(nx, dx),
            ey: eig(ny, dy),
            dst_x: Dst1::new(nx),
            dst_y: Dst1::new(ny),
        }
    }

    /// Applies a DST along rows (`along_x`) or columns. Two real lines share
    /// one complex transform.
    fn transform(&self, u: &mut [f64], along_x: bool) {
        let (n, count, dst) = if along_x {
            (self.nx, self.ny, &self.dst_x)
        } else {
            (self.ny, self.nx, &self.dst_y)
        };
        let idx = |line: usize, k: usize| if along_x { line * self.nx + k } else { k * self.nx + line };
        let mut buf = vec![Complex64::default(); n];
        let mut scratch = dst.scratch();
        let mut line = 0;
        while line < count {
            let second = line + 1 < count;
            for k in 0..n {
                buf[k] = Complex64::new(u[idx(line, k)], if second { u[idx(line + 1, k)] } else { 0.0 });
            }
            dst.apply(&mut buf, &mut scratch);
            for k in 0..n {
                u[idx(line, k)] = buf[k].re;
                if second {
                    u[idx(line + 1, k)] = buf[k].im;
                }
            }
            line += 2;
        }
    }

    pub fn solve(&self, f: &[f64], out: &mut [f64]) {
        out.copy_from_slice(f);
        self.transform(out, true);
        self.transform(out, false);
        let s = 4.0 / ((self.nx + 1) * (self.ny + 1)) as f64;
        for j in 0..self.ny {
            for i in 0..self.nx {
                out[j * self.nx + i] *= s / (self.tau + self.ex[i] + self.ey[j]);
            }
        }
        self.transform(out, true);
        self.transform(out, false);
    }
}

/// Preconditioned conjugate gradients for symmetric positive definite `a`.
/// Returns the iteration count.
pub fn pcg(
    a: impl Fn(&[f64], &mut [f64]),
    m: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<usize> {
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0);
    }
    let mut r = vec![0.0; n];
    a(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut z = vec![0.0; n];
    m(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        if norm(&r) <= tol * bnorm {
            return Ok(it);
        }
        a(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::LinearSolve(format!(
                "operator is not positive definite (p.Ap = {pap:e})"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        m(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if norm(&r) <= tol * bnorm {
        return Ok(max_iter);
    }
    Err(Error::LinearSolve(format!(
        "CG stalled at relative residual {:e}",
        norm(&r) / bnorm
    )))
}

/// Right-preconditioned BiCGSTAB for general real `a`.
pub fn bicgstab(
    a: impl Fn(&[f64], &mut [f64]),
    m: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<usize> {
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0);
    }
    let mut r = vec![0.0; n];
    a(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut phat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut shat = vec![0.0; n];
    let mut t = vec![0.0; n];
    for it in 0..max_iter {
        if norm(&r) <= tol * bnorm {
            return Ok(it);
        }
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 || omega == 0.0 {
            return Err(Error::LinearSolve("BiCGSTAB breakdown".into()));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        m(&p, &mut phat);
        a(&phat, &mut v);
        alpha = rho / dot(&r0, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) <= tol * bnorm {
            for i in 0..n {
                x[i] += alpha * phat[i];
            }
            return Ok(it + 1);
        }
        m(&s, &mut shat);
        a(&shat, &mut t);
        omega = dot(&t, &s) / dot(&t, &t);
        for i in 0..n {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
    }
    if norm(&r) <= tol * bnorm {
        return Ok(max_iter);
    }
    Err(Error::LinearSolve(format!(
        "BiCGSTAB stalled at relative residual {:e}",
        norm(&r) / bnorm
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_solves_real_and_complex_systems() {
        let n = 6;
        let lo = vec![-1.0; n];
        let di = vec![4.0; n];
        let up = vec![-1.5; n];
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 1.0).collect();
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| {
                let mut v = di[i] * x[i];
                if i > 0 {
                    v += lo[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += up[i] * x[i + 1];
                }
                v
            })
            .collect();
        let mut scratch = vec![0.0; n];
        thomas(&lo, &di, &up, &mut rhs, &mut scratch);
        for (a, b) in rhs.iter().zip(&x) {
            assert!((a - b).abs() < 1e-13);
        }
        let c = Complex64::new(0.0, 1.0);
        let di_c = vec![Complex64::new(2.0, 0.0) + c; 3];
        let off = vec![Complex64::new(-1.0, 0.0); 3];
        let mut r = vec![Complex64::new(1.0, 0.0); 3];
        let mut sc = vec![Complex64::default(); 3];
        thomas(&off, &di_c, &off, &mut r, &mut sc);
        let back0 = di_c[0] * r[0] + off[0] * r[1];
        assert!((back0 - Complex64::new(1.0, 0.0)).norm() < 1e-13);
    }

    fn laplacian(nx: usize, ny: usize, dx: f64, dy: f64, tau: f64, u: &[f64], out: &mut [f64]) {
        for j in 0..ny {
            for i in 0..nx {
                let c = u[j * nx + i];
                let l = if i > 0 { u[j * nx + i - 1] } else { 0.0 };
                let r = if i + 1 < nx { u[j * nx + i + 1] } else { 0.0 };
                let d = if j > 0 { u[(j - 1) * nx + i] } else { 0.0 };
                let t = if j + 1 < ny { u[(j + 1) * nx + i] } else { 0.0 };
                out[j * nx + i] = tau * c - (l - 2.0 * c + r) / (dx * dx) - (d - 2.0 * c + t) / (dy * dy);
            }
        }
    }

    #[test]
    fn dirichlet_poisson_inverts_the_shifted_laplacian() {
        let (nx, ny, dx, dy, tau) = (13, 9, 0.3, 0.2, 1.7);
        let u: Vec<f64> = (0..nx * ny).map(|k| ((k * 7) % 11) as f64 - 5.0).collect();
        let mut f = vec![0.0; nx * ny];
        laplacian(nx, ny, dx, dy, tau, &u, &mut f);
        let mut back = vec![0.0; nx * ny];
        DirichletPoisson::new(nx, ny, dx, dy, tau).solve(&f, &mut back);
        for (a, b) in u.iter().zip(&back) {
            assert!((a - b).abs() < 1e-10, "{a} {b}");
        }
    }

    #[test]
    fn krylov_solvers_converge() {
        let (nx, ny, dx, dy) = (20, 16, 0.1, 0.1);
        let pot: Vec<f64> = (0..nx * ny).map(|k| 3.0 + (k as f64 * 0.37).sin()).collect();
        let apply = |u: &[f64], out: &mut [f64]| {
            laplacian(nx, ny, dx, dy, 0.0, u, out);
            for k in 0..u.len() {
                out[k] += pot[k] * u[k];
            }
        };
        let pre = DirichletPoisson::new(nx, ny, dx, dy, 3.0);
        let b: Vec<f64> = (0..nx * ny).map(|k| (k % 5) as f64).collect();
        for use_cg in [true, false] {
            let mut x = vec![0.0; nx * ny];
            let its = if use_cg {
                pcg(apply, |r, z| pre.solve(r, z), &b, &mut x, 1e-12, 200).unwrap()
            } else {
                bicgstab(apply, |r, z| pre.solve(r, z), &b, &mut x, 1e-12, 200).unwrap()
            };
            assert!(its > 0 && its < 60, "{its}");
            let mut ax = vec![0.0; nx * ny];
            apply(&x, &mut ax);
            let res: f64 = ax.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            assert!(res < 1e-10 * norm(&b));
        }
    }
}
