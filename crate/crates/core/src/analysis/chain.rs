use crate::bpm::{interior_mode, propagate_with, BpmSettings, PropagationResult, SnapshotPlan};
use crate::error::{invalid, Error, Result};
use crate::field::FieldSlice;
use crate::geometry::{frustum_index_map, FrustumGeometry, FrustumProvider};
use crate::grid::Grid2D;
use crate::modes::ModeProfile;

use super::overlap::{loss_db, overlap_efficiency};

/// Loss budget of source, taper and fiber, all in dB.
#[derive(Debug, Clone)]
pub struct LossBreakdown {
    /// Source into the input-facet fundamental mode.
    pub facet_db: f64,
    /// Facet mode to exit mode through the taper.
    pub propagation_db: f64,
    /// Output field into the fiber mode.
    pub exit_db: f64,
    pub total_db: f64,
    pub facet_n_eff: f64,
    pub exit_n_eff: f64,
    /// Reference index the taper run used.
    pub n_ref: f64,
    /// Field the facet term was computed for.
    pub source: FieldSlice,
    pub propagation: PropagationResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOptions {
    /// Replace `settings.n_ref` by the facet mode index.
    pub n_ref_from_facet: bool,
    pub snapshots: SnapshotPlan,
    /// Propagation end, defaulting to the taper length; the exit mode is
    /// solved there.
    pub z_end: Option<f64>,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            n_ref_from_facet: true,
            snapshots: SnapshotPlan::Ends,
            z_end: None,
        }
    }
}

/// Facet and exit modes of `geometry` on `grid`.
pub fn taper_modes(
    geometry: &FrustumGeometry,
    grid: &Grid2D,
    settings: &BpmSettings,
) -> Result<(ModeProfile, ModeProfile)> {
    taper_modes_at(geometry, grid, settings, geometry.length)
}

/// Facet mode and the mode at `z_exit`.
pub fn taper_modes_at(
    geometry: &FrustumGeometry,
    grid: &Grid2D,
    settings: &BpmSettings,
    z_exit: f64,
) -> Result<(ModeProfile, ModeProfile)> {
    let facet = interior_mode(&frustum_index_map(geometry, 0.0, grid)?, settings, None)?;
    if z_exit == 0.0 {
        return Ok((facet.clone(), facet));
    }
    let exit = interior_mode(&frustum_index_map(geometry, z_exit, grid)?, settings, None)?;
    Ok((facet, exit))
}

pub(crate) fn exit_position(geometry: &FrustumGeometry, opts: &ChainOptions) -> Result<f64> {
    let z = opts.z_end.unwrap_or(geometry.length);
    if !(z.is_finite() && (0.0..=geometry.length).contains(&z)) {
        return Err(invalid("z_end", format!("{z} um is outside [0, {}] um", geometry.length)));
    }
    Ok(z)
}

/// End-to-end coupling from `source` through `geometry` into `fiber`.
pub fn end_to_end_loss(
    source: &FieldSlice,
    geometry: &FrustumGeometry,
    fiber: &ModeProfile,
    settings: &BpmSettings,
) -> Result<LossBreakdown> {
    end_to_end_loss_with(source, geometry, fiber, settings, &ChainOptions::default())
}

/// As [`end_to_end_loss`]. The taper is driven by its own facet mode, so
/// the three terms measure separate mechanisms: facet mismatch, taper
/// conversion and radiation, and the exit-to-fiber mismatch of the field
/// that actually arrives.
pub fn end_to_end_loss_with(
    source: &FieldSlice,
    geometry: &FrustumGeometry,
    fiber: &ModeProfile,
    settings: &BpmSettings,
    opts: &ChainOptions,
) -> Result<LossBreakdown> {
    let (facet, exit) = taper_modes_at(geometry, source.grid(), settings, exit_position(geometry, opts)?)?;
    chain(source, geometry, &facet, &exit, fiber, settings, opts)
}

pub(crate) fn chain(
    source: &FieldSlice,
    geometry: &FrustumGeometry,
    facet: &ModeProfile,
    exit: &ModeProfile,
    fiber: &ModeProfile,
    settings: &BpmSettings,
    opts: &ChainOptions,
) -> Result<LossBreakdown> {
    geometry.validate()?;
    if source.polarization() != settings.polarization {
        return Err(Error::GridMismatch(format!(
            "source polarization {} vs settings {}",
            source.polarization().name(),
            settings.polarization.name()
        )));
    }
    let eta_facet = overlap_efficiency(source, &facet.field)?;
    let settings = BpmSettings {
        n_ref: if opts.n_ref_from_facet { facet.n_eff } else { settings.n_ref },
        ..*settings
    };
    let provider = FrustumProvider::new(*geometry, *source.grid());
    let propagation = propagate_with(
        &facet.field,
        &provider,
        &settings,
        exit_position(geometry, opts)?,
        Some(exit),
        &opts.snapshots,
    )?;
    let eta_exit = overlap_efficiency(&propagation.final_field, &fiber.field)?;
    let facet_db = loss_db(eta_facet);
    let propagation_db = loss_db(propagation.final_power());
    let exit_db = loss_db(eta_exit);
    Ok(LossBreakdown {
        facet_db,
        propagation_db,
        exit_db,
        total_db: facet_db + propagation_db + exit_db,
        facet_n_eff: facet.n_eff,
        exit_n_eff: exit.n_eff,
        n_ref: settings.n_ref,
        source: source.clone(),
        propagation,
    })
}
