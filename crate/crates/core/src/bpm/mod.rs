//! Semi-vectorial paraxial beam propagation.
//!
//! The envelope obeys `2 i k0 n_ref dE/dz = lap E + k0^2 (n^2 - n_ref^2) E`
//! with the `exp(-i beta z)` carrier removed. Each step is a Crank-Nicolson
//! update split into x and y line solves; the absorbing layer is a complex
//! coordinate stretch folded into the second differences.

mod launch;
mod pml;
mod propagate;
mod settings;
mod step;

pub use launch::interior_mode;
pub use pml::{apply_pml, PmlProfile};
pub use propagate::{propagate, propagate_with, PropagationResult, SnapshotPlan};
pub use settings::BpmSettings;
pub use step::{bpm_step, bpm_step_ordered, SweepOrder};
