use ndarray::Array2;

use crate::error::{ensure_positive, invalid, Error, Result};
use crate::grid::Grid2D;

/// `(n_core, n_clad, n_substrate)` for photoresist guides printed on
/// polycarbonate with an air upper cladding.
pub const LITHO_INDICES: (f64, f64, f64) = (1.590, 1.000, 1.580);

/// Weak-guidance `(n_core, n_clad, n_substrate)` used for the taper benchmark.
pub const BENCHMARK_INDICES: (f64, f64, f64) = (1.455, 1.445, 1.445);

/// How cell values are taken from the piecewise-constant geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexSampling {
    /// Index at the cell centre; only the declared index values appear.
    #[default]
    CellCenter,
    /// Linear area-weighted mix of the indices covering each cell.
    AreaWeighted,
}

/// Real refractive-index distribution `n(x, y)` at longitudinal position `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexMap {
    grid: Grid2D,
    z: f64,
    n: Array2<f64>,
}

impl IndexMap {
    pub fn new(grid: Grid2D, z: f64, n: Array2<f64>) -> Result<Self> {
        if n.dim() != grid.shape() {
            return Err(Error::GridMismatch(format!(
                "index array {:?} does not match grid {:?}",
                n.dim(),
                grid.shape()
            )));
        }
        if let Some(bad) = n.iter().find(|v| !(v.is_finite() && **v >= 1.0)) {
            return Err(invalid("n", format!("indices must be finite and >= 1, found {bad}")));
        }
        Ok(Self { grid, z, n })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.n
    }

    pub fn max(&self) -> f64 {
        self.n.iter().cloned().fold(f64::MIN, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.n.iter().cloned().fold(f64::MAX, f64::min)
    }

    /// Largest index on the outermost ring of cells.
    pub fn boundary_max(&self) -> f64 {
        let (ny, nx) = self.n.dim();
        let mut m = f64::MIN;
        for i in 0..nx {
            m = m.max(self.n[[0, i]]).max(self.n[[ny - 1, i]]);
        }
        for j in 0..ny {
            m = m.max(self.n[[j, 0]]).max(self.n[[j, nx - 1]]);
        }
        m
    }

    /// Sub-map of `nx` by `ny` cells starting at cell `(i0, j0)`.
    pub fn crop(&self, i0: usize, j0: usize, nx: usize, ny: usize) -> Result<IndexMap> {
        let (gy, gx) = self.n.dim();
        if nx == 0 || ny == 0 || i0 + nx > gx || j0 + ny > gy {
            return Err(invalid(
                "crop",
                format!("window {nx}x{ny} at ({i0}, {j0}) exceeds {gx}x{gy} cells"),
            ));
        }
        let g = &self.grid;
        let grid = Grid2D::new(nx, ny, g.dx, g.dy, (g.x(i0), g.y(j0)))?;
        let n = self.n.slice(ndarray::s![j0..j0 + ny, i0..i0 + nx]).to_owned();
        IndexMap::new(grid, self.z, n)
    }

    /// Index map translated by whole cells; vacated cells take `fill`.
    pub fn shifted(&self, di: i64, dj: i64, fill: f64) -> Result<IndexMap> {
        let (ny, nx) = self.n.dim();
        let n = Array2::from_shape_fn((ny, nx), |(j, i)| {
            let si = i as i64 - di;
            let sj = j as i64 - dj;
            if si >= 0 && sj >= 0 && (si as usize) < nx && (sj as usize) < ny {
                self.n[[sj as usize, si as usize]]
            } else {
                fill
            }
        });
        IndexMap::new(self.grid, self.z, n)
    }
}

/// Frustum (dual-taper) guide: rectangular core whose width and height vary
/// linearly from the input facet to the output facet, resting on the
/// substrate plane `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrustumGeometry {
    pub w_in: f64,
    pub w_out: f64,
    pub h_in: f64,
    pub h_out: f64,
    pub length: f64,
    pub n_core: f64,
    pub n_clad: f64,
    pub n_substrate: f64,
}

impl FrustumGeometry {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        w_in: f64,
        w_out: f64,
        h_in: f64,
        h_out: f64,
        length: f64,
        n_core: f64,
        n_clad: f64,
        n_substrate: f64,
    ) -> Result<Self> {
        let g = Self {
            w_in,
            w_out,
            h_in,
            h_out,
            length,
            n_core,
            n_clad,
            n_substrate,
        };
        g.validate()?;
        Ok(g)
    }

    /// 3x2 um → 10x10 um over 1000 um with the weak-guidance benchmark indices.
    pub fn benchmark() -> Self {
        let (n_core, n_clad, n_substrate) = BENCHMARK_INDICES;
        Self {
            w_in: 3.0,
            w_out: 10.0,
            h_in: 2.0,
            h_out: 10.0,
            length: 1000.0,
            n_core,
            n_clad,
            n_substrate,
        }
    }

    /// Straight guide with a constant cross-section.
    pub fn straight(width: f64, height: f64, length: f64, indices: (f64, f64, f64)) -> Result<Self> {
        Self::new(width, width, height, height, length, indices.0, indices.1, indices.2)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("w_in", self.w_in),
            ("w_out", self.w_out),
            ("h_in", self.h_in),
            ("h_out", self.h_out),
            ("length", self.length),
        ] {
            ensure_positive(name, v)?;
        }
        for (name, v) in [
            ("n_core", self.n_core),
            ("n_clad", self.n_clad),
            ("n_substrate", self.n_substrate),
        ] {
            if !(v.is_finite() && v >= 1.0) {
                return Err(invalid(name, format!("index must be >= 1, got {v}")));
            }
        }
        if !(self.n_core > self.n_clad && self.n_core > self.n_substrate) {
            return Err(invalid(
                "n_core",
                "core index must exceed cladding and substrate indices",
            ));
        }
        Ok(())
    }

    pub fn width_at(&self, z: f64) -> f64 {
        self.w_in + (self.w_out - self.w_in) * z / self.length
    }

    pub fn height_at(&self, z: f64) -> f64 {
        self.h_in + (self.h_out - self.h_in) * z / self.length
    }

    /// The same guide traversed from the output facet back to the input.
    pub fn reversed(&self) -> Self {
        Self {
            w_in: self.w_out,
            w_out: self.w_in,
            h_in: self.h_out,
            h_out: self.h_in,
            ..*self
        }
    }
}

fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

/// Cross-section of `geom` at `z`, sampled at cell centres.
pub fn frustum_index_map(geom: &FrustumGeometry, z: f64, grid: &Grid2D) -> Result<IndexMap> {
    frustum_index_map_with(geom, z, grid, IndexSampling::CellCenter)
}

pub fn frustum_index_map_with(
    geom: &FrustumGeometry,
    z: f64,
    grid: &Grid2D,
    sampling: IndexSampling,
) -> Result<IndexMap> {
    geom.validate()?;
    if !(z.is_finite() && (0.0..=geom.length).contains(&z)) {
        return Err(invalid(
            "z",
            format!("position {z} um lies outside [0, {}]", geom.length),
        ));
    }
    let half_w = 0.5 * geom.width_at(z);
    let h = geom.height_at(z);
    let n = match sampling {
        IndexSampling::CellCenter => Array2::from_shape_fn(grid.shape(), |(j, i)| {
            let (x, y) = (grid.x(i), grid.y(j));
            if y < 0.0 {
                geom.n_substrate
            } else if x.abs() <= half_w && y <= h {
                geom.n_core
            } else {
                geom.n_clad
            }
        }),
        IndexSampling::AreaWeighted => {
            let area = grid.cell_area();
            Array2::from_shape_fn(grid.shape(), |(j, i)| {
                let (x, y) = (grid.x(i), grid.y(j));
                let (xa, xb) = (x - 0.5 * grid.dx, x + 0.5 * grid.dx);
                let (ya, yb) = (y - 0.5 * grid.dy, y + 0.5 * grid.dy);
                let f_core = overlap(xa, xb, -half_w, half_w) * overlap(ya, yb, 0.0, h) / area;
                let f_sub = overlap(ya, yb, f64::MIN, 0.0) / grid.dy;
                let f_clad = (1.0 - f_core - f_sub).max(0.0);
                f_core * geom.n_core + f_sub * geom.n_substrate + f_clad * geom.n_clad
            })
        }
    };
    IndexMap::new(*grid, z, n)
}

/// Step-index fiber cross-section centred on the origin.
pub fn fiber_index_map(core_diameter: f64, n1: f64, n2: f64, grid: &Grid2D) -> Result<IndexMap> {
    fiber_index_map_centered(core_diameter, n1, n2, grid, (0.0, 0.0), IndexSampling::CellCenter)
}

pub fn fiber_index_map_centered(
    core_diameter: f64,
    n1: f64,
    n2: f64,
    grid: &Grid2D,
    center: (f64, f64),
    sampling: IndexSampling,
) -> Result<IndexMap> {
    ensure_positive("core_diameter", core_diameter)?;
    if !(n2.is_finite() && n2 >= 1.0) {
        return Err(invalid("n2", format!("cladding index must be >= 1, got {n2}")));
    }
    if !(n1 > n2) {
        return Err(invalid("n1", format!("core index {n1} must exceed cladding {n2}")));
    }
    let r = 0.5 * core_diameter;
    let inside = |x: f64, y: f64| (x - center.0).hypot(y - center.1) <= r;
    const SUB: usize = 16;
    let n = Array2::from_shape_fn(grid.shape(), |(j, i)| {
        let (x, y) = (grid.x(i), grid.y(j));
        match sampling {
            IndexSampling::CellCenter => {
                if inside(x, y) {
                    n1
                } else {
                    n2
                }
            }
            IndexSampling::AreaWeighted => {
                let corners = [
                    inside(x - 0.5 * grid.dx, y - 0.5 * grid.dy),
                    inside(x + 0.5 * grid.dx, y - 0.5 * grid.dy),
                    inside(x - 0.5 * grid.dx, y + 0.5 * grid.dy),
                    inside(x + 0.5 * grid.dx, y + 0.5 * grid.dy),
                ];
                if corners.iter().all(|&c| c) {
                    n1
                } else if corners.iter().all(|&c| !c) && !inside(x, y) {
                    n2
                } else {
                    let mut hits = 0usize;
                    for a in 0..SUB {
                        for b in 0..SUB {
                            let sx = x + ((a as f64 + 0.5) / SUB as f64 - 0.5) * grid.dx;
                            let sy = y + ((b as f64 + 0.5) / SUB as f64 - 0.5) * grid.dy;
                            hits += inside(sx, sy) as usize;
                        }
                    }
                    let f = hits as f64 / (SUB * SUB) as f64;
                    f * n1 + (1.0 - f) * n2
                }
            }
        }
    });
    IndexMap::new(*grid, 0.0, n)
}

pub fn uniform_index_map(grid: &Grid2D, n: f64) -> Result<IndexMap> {
    IndexMap::new(*grid, 0.0, Array2::from_elem(grid.shape(), n))
}

/// Supplies the cross-section to the propagator at any `z`.
pub trait IndexProvider: Sync {
    fn grid(&self) -> &Grid2D;
    fn index_at(&self, z: f64) -> Result<IndexMap>;
}

/// Frustum cross-sections sampled on a fixed grid.
#[derive(Debug, Clone)]
pub struct FrustumProvider {
    pub geometry: FrustumGeometry,
    pub grid: Grid2D,
    pub sampling: IndexSampling,
}

impl FrustumProvider {
    pub fn new(geometry: FrustumGeometry, grid: Grid2D) -> Self {
        Self {
            geometry,
            grid,
            sampling: IndexSampling::CellCenter,
        }
    }
}

impl IndexProvider for FrustumProvider {
    fn grid(&self) -> &Grid2D {
        &self.grid
    }

    fn index_at(&self, z: f64) -> Result<IndexMap> {
        let z = z.clamp(0.0, self.geometry.length);
        frustum_index_map_with(&self.geometry, z, &self.grid, self.sampling)
    }
}

/// z-invariant structure.
#[derive(Debug, Clone)]
pub struct StaticIndex(pub IndexMap);

impl IndexProvider for StaticIndex {
    fn grid(&self) -> &Grid2D {
        self.0.grid()
    }

    fn index_at(&self, _z: f64) -> Result<IndexMap> {
        Ok(self.0.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bpm_grid() -> Grid2D {
        Grid2D::centered(300, 300, 0.1, 0.1, (0.0, 5.0)).unwrap()
    }

    fn core_extent(map: &IndexMap, n_core: f64) -> (f64, f64) {
        let g = map.grid();
        let cells = map.values().iter().filter(|&&v| v == n_core).count();
        let cols = (0..g.nx)
            .filter(|&i| (0..g.ny).any(|j| map.values()[[j, i]] == n_core))
            .count();
        let width = cols as f64 * g.dx;
        (width, cells as f64 * g.cell_area() / width)
    }

    #[test]
    fn facet_cross_sections() {
        let geom = FrustumGeometry::benchmark();
        let grid = bpm_grid();
        let (w, h) = core_extent(&frustum_index_map(&geom, 0.0, &grid).unwrap(), geom.n_core);
        assert!((w - 3.0).abs() < 1e-9 && (h - 2.0).abs() < 1e-9, "{w} x {h}");
        let (w, h) = core_extent(&frustum_index_map(&geom, 1000.0, &grid).unwrap(), geom.n_core);
        assert!((w - 10.0).abs() < 1e-9 && (h - 10.0).abs() < 1e-9, "{w} x {h}");
        assert!((geom.width_at(500.0) - 6.5).abs() < 1e-12);
        assert!((geom.height_at(500.0) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_positions_outside_the_taper() {
        let geom = FrustumGeometry::benchmark();
        assert!(frustum_index_map(&geom, -0.1, &bpm_grid()).is_err());
        assert!(frustum_index_map(&geom, 1000.1, &bpm_grid()).is_err());
    }

    #[test]
    fn rejects_non_guiding_indices() {
        assert!(FrustumGeometry::new(3.0, 10.0, 2.0, 10.0, 1000.0, 1.44, 1.445, 1.445).is_err());
        assert!(FrustumGeometry::new(3.0, 10.0, 2.0, 10.0, 0.0, 1.455, 1.445, 1.445).is_err());
    }

    #[test]
    fn cell_center_maps_only_use_declared_indices() {
        let geom = FrustumGeometry::benchmark();
        let map = frustum_index_map(&geom, 333.3, &bpm_grid()).unwrap();
        assert!(map
            .values()
            .iter()
            .all(|&v| v == geom.n_core || v == geom.n_clad || v == geom.n_substrate));
    }

    #[test]
    fn area_weighted_map_preserves_core_area() {
        let geom = FrustumGeometry::new(3.05, 3.05, 2.03, 2.03, 10.0, 1.5, 1.0, 1.2).unwrap();
        let grid = bpm_grid();
        let map = frustum_index_map_with(&geom, 0.0, &grid, IndexSampling::AreaWeighted).unwrap();
        // Above the substrate, (n - n_clad)/(n_core - n_clad) integrates to the core area.
        let mut a = 0.0;
        for ((j, _), &v) in map.values().indexed_iter() {
            if grid.y(j) - 0.5 * grid.dy > -1e-9 {
                a += (v - 1.0) / 0.5 * grid.cell_area();
            }
        }
        assert!((a - 3.05 * 2.03).abs() < 1e-9, "{a}");
    }

    #[test]
    fn fiber_map_center_and_rule() {
        let grid = Grid2D::centered(201, 201, 0.1, 0.1, (0.0, 0.0)).unwrap();
        let map = fiber_index_map(9.0, 1.45, 1.444, &grid).unwrap();
        assert_eq!(map.values()[[100, 100]], 1.45);
        // Cell centre exactly at r = 4.5 um belongs to the core.
        assert_eq!(map.values()[[100, 145]], 1.45);
        assert_eq!(map.values()[[100, 146]], 1.444);
        assert!(fiber_index_map(9.0, 1.444, 1.444, &grid).is_err());
        assert!(fiber_index_map(-1.0, 1.45, 1.444, &grid).is_err());
    }

    #[test]
    fn fiber_area_fraction_matches_pixel_count() {
        let grid = Grid2D::centered(400, 400, 0.05, 0.05, (0.0, 0.0)).unwrap();
        let map = fiber_index_map(9.0, 1.45, 1.444, &grid).unwrap();
        let cells = map.values().iter().filter(|&&v| v == 1.45).count() as f64;
        let frac = cells / grid.len() as f64;
        let expect = std::f64::consts::PI * 4.5 * 4.5 / (grid.width() * grid.height());
        assert!((frac / expect - 1.0).abs() < 0.02, "{frac} vs {expect}");
    }

    #[test]
    fn boundary_max_and_shift() {
        let grid = Grid2D::centered(20, 20, 0.5, 0.5, (0.0, 0.0)).unwrap();
        let map = fiber_index_map(2.0, 1.5, 1.4, &grid).unwrap();
        assert_eq!(map.boundary_max(), 1.4);
        let s = map.shifted(3, -2, 1.4).unwrap();
        assert_eq!(s.values()[[8, 13]], map.values()[[10, 10]]);
    }
}
