//! Coupling efficiency, loss budgets and the parameter sweeps behind the
//! loss-versus-wavelength and taper-angle tables.

mod chain;
mod overlap;
mod sweep;

pub use chain::{end_to_end_loss, end_to_end_loss_with, taper_modes, taper_modes_at, ChainOptions, LossBreakdown};
pub use overlap::{loss_db, overlap_efficiency};
pub use sweep::{
    chain_at, tilt_gap_sweep, wavelength_sweep, FiberSpec, SourceSpec, SweepFailure, SweepResult, SweepRow,
    TiltGapCell, TiltGapSweep,
};
