//! Launch fields and reference modes: the laser-diode Gaussian, the analytic
//! LP01 fiber mode and a finite-difference eigenmode solver.

mod fiber;
pub(crate) mod operator;
mod solver;
mod source;

use crate::field::FieldSlice;

pub use fiber::{fiber_lp01_analytic, fiber_lp01_fundamental, v_parameter, Lp01, SINGLE_MODE_CUTOFF};
pub use solver::{solve_mode_fd, solve_mode_fd_with, solve_modes_fd, solve_slab_mode, ModeSolverOptions};
pub use source::elliptical_gaussian_source;

/// Guided mode: transverse field at unit power and its effective index.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    pub field: FieldSlice,
    pub n_eff: f64,
}
