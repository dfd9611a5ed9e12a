//! Benchmark fixtures shared by the criterion targets.

use taperlith_core::bpm::BpmSettings;
use taperlith_core::geometry::{frustum_index_map, trapezoid_mask, ExposureSetup, FrustumGeometry, IndexMap, MaskPattern};
use taperlith_core::modes::elliptical_gaussian_source;
use taperlith_core::{FieldSlice, Grid2D, Polarization};

/// Square BPM window of side 30 um around the taper axis.
pub fn bpm_grid(d: f64) -> Grid2D {
    let n = (30.0 / d).round() as usize;
    Grid2D::centered(n, n, d, d, (0.0, 5.0)).unwrap()
}

/// Benchmark frustum cross-section at `z`.
pub fn taper_section(grid: &Grid2D, z: f64) -> IndexMap {
    frustum_index_map(&FrustumGeometry::benchmark(), z, grid).unwrap()
}

pub fn gaussian(grid: &Grid2D, w: f64, lambda: f64, polarization: Polarization) -> FieldSlice {
    elliptical_gaussian_source(w, w, grid, lambda, polarization, (0.0, 1.0)).unwrap()
}

pub fn settings(polarization: Polarization) -> BpmSettings {
    BpmSettings {
        polarization,
        ..BpmSettings::default()
    }
}

/// Default litho mask and a mid-range inclined print.
pub fn print_case(gap0: f64) -> (MaskPattern, ExposureSetup) {
    let mask = trapezoid_mask(7.5, 14.5, 1000.0).unwrap();
    let setup = ExposureSetup {
        gap0,
        ..ExposureSetup::default()
    };
    (mask, setup)
}
