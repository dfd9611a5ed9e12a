//! Uniform 2-D sampling grid shared by every field and index map.

use crate::error::{invalid, Result};

/// Cell-centred uniform grid. Sample `(i, j)` sits at
/// `(x0 + i*dx, y0 + j*dy)`; arrays on the grid are stored `[[j, i]]`
/// (row-major, x fastest).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, origin: (f64, f64)) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(invalid("grid", format!("need nx, ny >= 2, got {nx}x{ny}")));
        }
        if !(dx.is_finite() && dx > 0.0 && dy.is_finite() && dy > 0.0) {
            return Err(invalid("grid", format!("spacing must be > 0, got dx={dx}, dy={dy}")));
        }
        if !(origin.0.is_finite() && origin.1.is_finite()) {
            return Err(invalid("grid", "origin must be finite"));
        }
        Ok(Self {
            nx,
            ny,
            dx,
            dy,
            x0: origin.0,
            y0: origin.1,
        })
    }

    /// Grid whose sample positions are symmetric about `center`.
    pub fn centered(nx: usize, ny: usize, dx: f64, dy: f64, center: (f64, f64)) -> Result<Self> {
        let x0 = center.0 - 0.5 * (nx as f64 - 1.0) * dx;
        let y0 = center.1 - 0.5 * (ny as f64 - 1.0) * dy;
        Self::new(nx, ny, dx, dy, (x0, y0))
    }

    /// Centred grid covering `width x height` with the requested spacing.
    pub fn covering(width: f64, height: f64, dx: f64, dy: f64, center: (f64, f64)) -> Result<Self> {
        if !(width > 0.0 && height > 0.0) {
            return Err(invalid("grid", "extent must be > 0"));
        }
        let nx = (width / dx).round() as usize;
        let ny = (height / dy).round() as usize;
        Self::centered(nx, ny, dx, dy, center)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.dy
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }

    /// Array shape `(ny, nx)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.ny, self.nx)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn width(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    pub fn height(&self) -> f64 {
        self.ny as f64 * self.dy
    }

    /// Same sample count, spacing and origin (origin and spacing to 1e-9 relative).
    pub fn matches(&self, other: &Grid2D) -> bool {
        let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= 1e-9 * scale.max(1.0);
        self.nx == other.nx
            && self.ny == other.ny
            && close(self.dx, other.dx, self.dx)
            && close(self.dy, other.dy, self.dy)
            && close(self.x0, other.x0, self.dx.max(self.x0.abs()))
            && close(self.y0, other.y0, self.dy.max(self.y0.abs()))
    }

    /// Translated copy with the origin moved by whole cells.
    pub fn translated(&self, di: i64, dj: i64) -> Self {
        Self {
            x0: self.x0 + di as f64 * self.dx,
            y0: self.y0 + dj as f64 * self.dy,
            ..*self
        }
    }

    /// Grid with spacing halved over the same extent (twice the samples).
    pub fn refined(&self) -> Self {
        let dx = 0.5 * self.dx;
        let dy = 0.5 * self.dy;
        Self {
            nx: self.nx * 2,
            ny: self.ny * 2,
            dx,
            dy,
            x0: self.x0 - 0.5 * dx,
            y0: self.y0 - 0.5 * dy,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid2D::new(1, 4, 0.1, 0.1, (0.0, 0.0)).is_err());
        assert!(Grid2D::new(4, 4, 0.0, 0.1, (0.0, 0.0)).is_err());
        assert!(Grid2D::new(4, 4, 0.1, -1.0, (0.0, 0.0)).is_err());
    }

    #[test]
    fn centered_grid_is_symmetric() {
        let g = Grid2D::centered(300, 300, 0.1, 0.1, (0.0, 5.0)).unwrap();
        assert!((g.x(0) + g.x(299)).abs() < 1e-12);
        assert!((g.y(0) + g.y(299) - 10.0).abs() < 1e-12);
        assert!((g.x(150) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn refined_grid_keeps_extent() {
        let g = Grid2D::centered(10, 6, 0.2, 0.2, (1.0, -1.0)).unwrap();
        let r = g.refined();
        assert!((r.width() - g.width()).abs() < 1e-12);
        assert!(((r.x(0) - 0.5 * r.dx) - (g.x(0) - 0.5 * g.dx)).abs() < 1e-12);
    }
}
