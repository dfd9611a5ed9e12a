use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::geometry::IndexMap;
use crate::grid::Grid2D;

use super::BpmSettings;

/// Complex coordinate stretch `s = 1 - i strength (d / thickness)^2` along
/// both axes, sampled at cell centres and at the midpoints between cells.
/// `d` is the depth into the layer; `s = 1` in the interior.
#[derive(Debug, Clone, PartialEq)]
pub struct PmlProfile {
    /// Imaginary stretch at x cell centres.
    pub sx: Vec<f64>,
    /// At `x_{i+1/2}`, `nx + 1` entries starting at `x_{-1/2}`.
    pub sx_half: Vec<f64>,
    pub sy: Vec<f64>,
    pub sy_half: Vec<f64>,
}

fn depth(pos: f64, lo: f64, hi: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let d = if pos < lo + t {
        lo + t - pos
    } else if pos > hi - t {
        pos - (hi - t)
    } else {
        0.0
    };
    (d / t).min(1.0)
}

fn axis(n: usize, d: f64, start: f64, thickness: f64, strength: f64) -> (Vec<f64>, Vec<f64>) {
    // Layer measured from the outer cell faces.
    let lo = start - 0.5 * d;
    let hi = start + (n as f64 - 0.5) * d;
    let f = |p: f64| strength * depth(p, lo, hi, thickness).powi(2);
    let centre = (0..n).map(|i| f(start + i as f64 * d)).collect();
    let half = (0..=n).map(|i| f(start + (i as f64 - 0.5) * d)).collect();
    (centre, half)
}

/// Absorption profile of `settings` on `grid`.
pub fn apply_pml(settings: &BpmSettings, grid: &Grid2D) -> Result<PmlProfile> {
    settings.validate()?;
    let t = settings.pml_thickness;
    if t > 0.0 && (t >= 0.25 * grid.width() || t >= 0.25 * grid.height()) {
        return Err(invalid(
            "pml_thickness",
            format!("{t} um is not below a quarter of the {} x {} um domain", grid.width(), grid.height()),
        ));
    }
    let (sx, sx_half) = axis(grid.nx, grid.dx, grid.x0, t, settings.pml_strength);
    let (sy, sy_half) = axis(grid.ny, grid.dy, grid.y0, t, settings.pml_strength);
    Ok(PmlProfile { sx, sx_half, sy, sy_half })
}

impl PmlProfile {
    pub fn is_zero(&self) -> bool {
        self.sx.iter().chain(&self.sy).chain(&self.sx_half).chain(&self.sy_half).all(|&v| v == 0.0)
    }

    /// Whether cell `(j, i)` lies in the absorbing layer.
    pub fn absorbs(&self, j: usize, i: usize) -> bool {
        self.sx[i] != 0.0 || self.sy[j] != 0.0
    }

    /// Window `(i0, j0, nx, ny)` of cells free of absorption.
    pub fn interior_window(&self) -> (usize, usize, usize, usize) {
        let span = |v: &[f64]| {
            let lo = v.iter().position(|&s| s == 0.0).unwrap_or(0);
            let hi = v.iter().rposition(|&s| s == 0.0).map_or(v.len(), |k| k + 1);
            (lo, hi.saturating_sub(lo))
        };
        let (i0, nx) = span(&self.sx);
        let (j0, ny) = span(&self.sy);
        (i0, j0, nx, ny)
    }

    pub(crate) fn stretch(v: f64) -> Complex64 {
        Complex64::new(1.0, -v)
    }

    /// Rejects layers that reach index values above those at the boundary.
    pub fn check_clear_of_core(&self, index: &IndexMap) -> Result<()> {
        let bnd = index.boundary_max();
        for ((j, i), &n) in index.values().indexed_iter() {
            if self.absorbs(j, i) && n > bnd {
                let g = index.grid();
                return Err(Error::PmlOverlapsCore(format!(
                    "index {n} at ({:.3}, {:.3}) um lies inside the layer",
                    g.x(i),
                    g.y(j)
                )));
            }
        }
        Ok(())
    }
}
