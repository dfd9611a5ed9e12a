//! Proximity-printing lithography: Fresnel-regime aerial image behind a
//! tilted mask, threshold development of a negative resist, and
//! classification of the printed ridge.

mod aerial;
mod develop;
mod profile;
mod propagate;

pub use aerial::{aerial_image, aerial_image_with, litho_grid, AerialOptions, IntensityMap};
pub use develop::{develop, ResistProfile};
pub use profile::{
    classify_profile, crest_line, fit_slope, synthetic_ridge, vertical_taper_angle, ClassifyThresholds, CrestLine,
    ProfileClass, TaperAxis,
};
pub use propagate::{angular_spectrum_propagate, angular_spectrum_propagate_with, AsmOptions};


use crate::error::{ensure_positive, Result};
use crate::geometry::{ExposureSetup, MaskPattern};
use crate::grid::Grid2D;

/// Aerial image followed by development.
pub fn print_profile(
    mask: &MaskPattern,
    setup: &ExposureSetup,
    grid: &Grid2D,
    exposure_time: f64,
    opts: &AerialOptions,
) -> Result<ResistProfile> {
    let image = aerial_image_with(mask, setup, grid, opts)?;
    develop(&image, setup, exposure_time)
}

/// Resolution and process knobs of [`simulate_print`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintOptions {
    pub dx: f64,
    pub dy: f64,
    pub exposure_time: f64,
    pub aerial: AerialOptions,
}

impl Default for PrintOptions {
    fn default() -> Self {
        Self {
            dx: 0.2,
            dy: 0.2,
            exposure_time: 1.0,
            aerial: AerialOptions::default(),
        }
    }
}

/// Developed profile with its regime and fitted vertical taper angle.
#[derive(Debug, Clone)]
pub struct PrintOutcome {
    pub profile: ResistProfile,
    pub class: ProfileClass,
    pub angle_deg: f64,
}

/// Prints `mask` on the default litho grid and analyses the ridge.
pub fn simulate_print(mask: &MaskPattern, setup: &ExposureSetup, opts: &PrintOptions) -> Result<PrintOutcome> {
    ensure_positive("exposure_time", opts.exposure_time)?;
    let grid = litho_grid(mask, setup, opts.dx, opts.dy)?;
    let profile = print_profile(mask, setup, &grid, opts.exposure_time, &opts.aerial)?;
    let th = ClassifyThresholds::for_mask_width(mask.w_long());
    let class = classify_profile(&profile, TaperAxis::Y, &th)?;
    let angle_deg = vertical_taper_angle(&profile, TaperAxis::Y)?;
    Ok(PrintOutcome {
        profile,
        class,
        angle_deg,
    })
}
