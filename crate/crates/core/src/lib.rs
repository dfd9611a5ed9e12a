//! Simulation kernels for proximity-printed hemi-frustum waveguide tapers:
//! tilted-mask Fresnel lithography, finite-difference mode solving,
//! semi-vectorial beam propagation and fiber-coupling analysis.

pub mod analysis;
pub mod bpm;
pub mod error;
pub mod fft;
pub mod field;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod lithosim;
pub mod modes;
pub mod special;

pub use error::{Error, Result};
pub use field::{FieldSlice, Polarization};
pub use grid::Grid2D;
