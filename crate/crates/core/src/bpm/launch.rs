use ndarray::{s, Array2};

use crate::error::Result;
use crate::field::FieldSlice;
use crate::geometry::IndexMap;
use crate::modes::{solve_mode_fd_with, ModeProfile, ModeSolverOptions};

use super::pml::apply_pml;
use super::BpmSettings;

/// Fundamental mode of `index` solved on the cells outside the absorbing
/// layer and zero-padded back to the full grid. Launch and monitor fields
/// built this way carry no power inside the layer. Below cutoff the lowest
/// eigenmode of the window is returned.
pub fn interior_mode(index: &IndexMap, settings: &BpmSettings, n_guess: Option<f64>) -> Result<ModeProfile> {
    let pml = apply_pml(settings, index.grid())?;
    let (i0, j0, nx, ny) = pml.interior_window();
    let inner = index.crop(i0, j0, nx, ny)?;
    let opts = ModeSolverOptions {
        require_guided: false,
        ..ModeSolverOptions::default()
    };
    let m = solve_mode_fd_with(&inner, settings.lambda, settings.polarization, n_guess, &opts)?;
    let mut v = Array2::zeros(index.grid().shape());
    v.slice_mut(s![j0..j0 + ny, i0..i0 + nx]).assign(m.field.values());
    Ok(ModeProfile {
        field: FieldSlice::new(*index.grid(), v, settings.lambda, settings.polarization)?,
        n_eff: m.n_eff,
    })
}
