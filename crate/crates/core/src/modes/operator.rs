//! Five-point transverse operators with semi-vectorial interface terms.

use crate::field::Polarization;
use crate::geometry::IndexMap;

/// Coefficients of a three-point second difference along one axis, per
/// cell, already divided by the squared spacing. Neighbours outside the
/// grid are zero (Dirichlet).
#[derive(Debug, Clone)]
pub(crate) struct Axis3 {
    pub lo: Vec<f64>,
    pub di: Vec<f64>,
    pub up: Vec<f64>,
}

/// `L E = Dxx E + Dyy E + k0^2 n^2 E` on the index-map grid.
#[derive(Debug, Clone)]
pub(crate) struct Transverse {
    pub nx: usize,
    pub ny: usize,
    pub x: Axis3,
    pub y: Axis3,
    /// `k0^2 n^2`
    pub v: Vec<f64>,
}

/// Along one line with squared indices `n2`, returns the weights of the
/// left neighbour, centre and right neighbour. With `interface` set, the
/// difference acts on `n^2 E` and is divided by `n^2` at the midpoints.
fn line_weights(n2: &[f64], k: usize, interface: bool) -> (f64, f64, f64) {
    if !interface {
        return (1.0, -2.0, 1.0);
    }
    let c = n2[k];
    let l = if k > 0 { n2[k - 1] } else { c };
    let r = if k + 1 < n2.len() { n2[k + 1] } else { c };
    let tl = 2.0 * l / (c + l);
    let tr = 2.0 * r / (c + r);
    let dl = 2.0 * c / (c + l);
    let dr = 2.0 * c / (c + r);
    (tl, -(dl + dr), tr)
}

impl Transverse {
    pub fn new(index: &IndexMap, lambda: f64, polarization: Polarization) -> Self {
        let g = index.grid();
        let (nx, ny) = (g.nx, g.ny);
        let k0 = 2.0 * std::f64::consts::PI / lambda;
        let n = index.values();
        let n2: Vec<f64> = n.iter().map(|v| v * v).collect();
        let (ix, iy) = match polarization {
            Polarization::Scalar => (false, false),
            Polarization::Te => (true, false),
            Polarization::Tm => (false, true),
        };
        let len = nx * ny;
        let mut x = Axis3 {
            lo: vec![0.0; len],
            di: vec![0.0; len],
            up: vec![0.0; len],
        };
        let mut y = x.clone();
        let (sx, sy) = (1.0 / (g.dx * g.dx), 1.0 / (g.dy * g.dy));
        for j in 0..ny {
            let row = &n2[j * nx..(j + 1) * nx];
            for i in 0..nx {
                let (a, b, c) = line_weights(row, i, ix);
                let k = j * nx + i;
                x.lo[k] = a * sx;
                x.di[k] = b * sx;
                x.up[k] = c * sx;
            }
        }
        let mut col = vec![0.0; ny];
        for i in 0..nx {
            for j in 0..ny {
                col[j] = n2[j * nx + i];
            }
            for j in 0..ny {
                let (a, b, c) = line_weights(&col, j, iy);
                let k = j * nx + i;
                y.lo[k] = a * sy;
                y.di[k] = b * sy;
                y.up[k] = c * sy;
            }
        }
        let v = n2.iter().map(|m| k0 * k0 * m).collect();
        Self { nx, ny, x, y, v }
    }

    /// `out = (shift - L) u`
    pub fn apply_shifted(&self, shift: f64, u: &[f64], out: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let mut s = (self.x.di[k] + self.y.di[k] + self.v[k]) * u[k];
                if i > 0 {
                    s += self.x.lo[k] * u[k - 1];
                }
                if i + 1 < nx {
                    s += self.x.up[k] * u[k + 1];
                }
                if j > 0 {
                    s += self.y.lo[k] * u[k - nx];
                }
                if j + 1 < ny {
                    s += self.y.up[k] * u[k + nx];
                }
                out[k] = shift * u[k] - s;
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let (nx, ny) = (self.nx, self.ny);
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                if i + 1 < nx && (self.x.up[k] - self.x.lo[k + 1]).abs() > 1e-12 * self.x.up[k].abs() {
                    return false;
                }
                if j + 1 < ny && (self.y.up[k] - self.y.lo[k + nx]).abs() > 1e-12 * self.y.up[k].abs() {
                    return false;
                }
            }
        }
        true
    }
}
