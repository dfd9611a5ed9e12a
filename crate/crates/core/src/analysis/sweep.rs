use std::collections::BTreeMap;

use ndarray::Array2;
use rayon::prelude::*;

use crate::bpm::BpmSettings;
use crate::error::{invalid, Result};
use crate::geometry::{ExposureSetup, FrustumGeometry, MaskPattern};
use crate::grid::Grid2D;
use crate::lithosim::{simulate_print, PrintOptions, ProfileClass};
use crate::modes::{elliptical_gaussian_source, fiber_lp01_fundamental, ModeProfile};

use super::chain::{chain, exit_position, taper_modes_at, ChainOptions, LossBreakdown};

/// One successful sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub metric: f64,
    /// Values matching [`SweepResult::components`].
    pub components: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub value: f64,
    pub error: String,
}

/// A one-parameter table. Failed points are listed apart so every row
/// carries a finite metric.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: String,
    pub unit: String,
    pub metric: String,
    pub components: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub failures: Vec<SweepFailure>,
    pub metadata: BTreeMap<String, String>,
}

impl SweepResult {
    fn new(parameter: &str, unit: &str, metric: &str, components: &[&str]) -> Self {
        Self {
            parameter: parameter.into(),
            unit: unit.into(),
            metric: metric.into(),
            components: components.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            failures: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    fn push(&mut self, value: f64, outcome: std::result::Result<(f64, Vec<f64>), String>) {
        match outcome {
            Ok((metric, _)) if !metric.is_finite() => self.failures.push(SweepFailure {
                value,
                error: format!("non-finite {}: {metric}", self.metric),
            }),
            Ok((metric, components)) => self.rows.push(SweepRow {
                value,
                metric,
                components,
            }),
            Err(error) => self.failures.push(SweepFailure { value, error }),
        }
    }
}

fn strictly_increasing(name: &'static str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(invalid(name, "empty list"));
    }
    if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
        return Err(invalid(name, format!("non-finite value {bad}")));
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(name, "values must be strictly increasing"));
    }
    Ok(())
}

/// Field launched into the taper.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SourceSpec {
    /// The taper's own input-facet mode.
    #[default]
    FacetMode,
    /// Elliptical Gaussian with 1/e^2 radii `wx`, `wy` (um).
    Gaussian { wx: f64, wy: f64, center: (f64, f64) },
}

/// Step-index fiber at the output facet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberSpec {
    pub core_diameter: f64,
    pub n1: f64,
    pub n2: f64,
    pub center: (f64, f64),
}

impl Default for FiberSpec {
    fn default() -> Self {
        Self {
            core_diameter: 9.0,
            n1: 1.450,
            n2: 1.444,
            center: (0.0, 5.0),
        }
    }
}

impl FiberSpec {
    /// LP01 field of this fiber sampled on `grid`.
    pub fn mode(&self, grid: &Grid2D, settings: &BpmSettings) -> Result<ModeProfile> {
        fiber_lp01_fundamental(
            self.core_diameter,
            self.n1,
            self.n2,
            settings.lambda,
            grid,
            self.center,
            settings.polarization,
        )
    }
}

/// Full chain at one wavelength with modes solved for that wavelength.
pub fn chain_at(
    geometry: &FrustumGeometry,
    grid: &Grid2D,
    source: &SourceSpec,
    fiber: &FiberSpec,
    settings: &BpmSettings,
    opts: &ChainOptions,
) -> Result<LossBreakdown> {
    settings.validate()?;
    let (facet, exit) = taper_modes_at(geometry, grid, settings, exit_position(geometry, opts)?)?;
    let launch = match *source {
        SourceSpec::FacetMode => facet.field.clone(),
        SourceSpec::Gaussian { wx, wy, center } => {
            elliptical_gaussian_source(wx, wy, grid, settings.lambda, settings.polarization, center)?
        }
    };
    let fiber = fiber.mode(grid, settings)?;
    chain(&launch, geometry, &facet, &exit, &fiber, settings, opts)
}

/// Total loss against wavelength. Points run in parallel and are reported
/// in input order; a failing point is recorded and the sweep continues.
pub fn wavelength_sweep(
    lambdas: &[f64],
    geometry: &FrustumGeometry,
    grid: &Grid2D,
    source: &SourceSpec,
    fiber: &FiberSpec,
    settings: &BpmSettings,
    opts: &ChainOptions,
) -> Result<SweepResult> {
    strictly_increasing("lambdas", lambdas)?;
    if let Some(bad) = lambdas.iter().find(|&&l| l <= 0.0) {
        return Err(invalid("lambdas", format!("wavelength {bad} um is not positive")));
    }
    geometry.validate()?;
    let outcomes: Vec<_> = lambdas
        .par_iter()
        .map(|&lambda| {
            let s = BpmSettings { lambda, ..*settings };
            chain_at(geometry, grid, source, fiber, &s, opts)
                .map(|b| (b.total_db, vec![b.facet_db, b.propagation_db, b.exit_db]))
                .map_err(|e| e.to_string())
        })
        .collect();
    let mut out = SweepResult::new("wavelength", "um", "total_loss_db", &["facet_db", "propagation_db", "exit_db"]);
    for (&l, o) in lambdas.iter().zip(outcomes) {
        out.push(l, o);
    }
    out.metadata.insert("nx".into(), grid.nx.to_string());
    out.metadata.insert("ny".into(), grid.ny.to_string());
    out.metadata.insert("dx_um".into(), grid.dx.to_string());
    out.metadata.insert("dy_um".into(), grid.dy.to_string());
    out.metadata.insert("dz_um".into(), settings.dz.to_string());
    out.metadata.insert("polarization".into(), settings.polarization.name().into());
    Ok(out)
}

/// One lithography run of a tilt/gap sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltGapCell {
    pub tilt_deg: f64,
    pub gap0: f64,
    pub outcome: std::result::Result<(ProfileClass, f64), String>,
}

/// Regime and vertical taper angle over a tilt by gap grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltGapSweep {
    pub tilts: Vec<f64>,
    pub gaps: Vec<f64>,
    /// `[[tilt, gap]]`.
    pub cells: Array2<TiltGapCell>,
}

impl TiltGapSweep {
    pub fn class(&self, t: usize, g: usize) -> Option<ProfileClass> {
        self.cells[[t, g]].outcome.as_ref().ok().map(|o| o.0)
    }

    pub fn angle(&self, t: usize, g: usize) -> Option<f64> {
        self.cells[[t, g]].outcome.as_ref().ok().map(|o| o.1)
    }

    /// Taper angle against tilt at gap index `g`.
    pub fn angle_vs_tilt(&self, g: usize) -> SweepResult {
        let mut out = SweepResult::new("tilt", "deg", "taper_angle_deg", &[]);
        for t in 0..self.tilts.len() {
            let c = &self.cells[[t, g]];
            out.push(c.tilt_deg, c.outcome.clone().map(|o| (o.1, vec![])));
        }
        out.metadata.insert("gap0_um".into(), self.gaps[g].to_string());
        out
    }

    /// Taper angle against gap at tilt index `t`.
    pub fn angle_vs_gap(&self, t: usize) -> SweepResult {
        let mut out = SweepResult::new("gap0", "um", "taper_angle_deg", &[]);
        for g in 0..self.gaps.len() {
            let c = &self.cells[[t, g]];
            out.push(c.gap0, c.outcome.clone().map(|o| (o.1, vec![])));
        }
        out.metadata.insert("tilt_deg".into(), self.tilts[t].to_string());
        out
    }
}

/// Prints `mask` at every `(tilt, gap0)` pair with the other settings of
/// `setup`.
pub fn tilt_gap_sweep(
    tilts: &[f64],
    gaps: &[f64],
    mask: &MaskPattern,
    setup: &ExposureSetup,
    opts: &PrintOptions,
) -> Result<TiltGapSweep> {
    strictly_increasing("tilts", tilts)?;
    strictly_increasing("gaps", gaps)?;
    let pairs: Vec<(f64, f64)> = tilts.iter().flat_map(|&t| gaps.iter().map(move |&g| (t, g))).collect();
    let cells: Vec<TiltGapCell> = pairs
        .par_iter()
        .map(|&(tilt_deg, gap0)| {
            let s = setup.with_tilt_gap(tilt_deg, gap0);
            let outcome = simulate_print(mask, &s, opts)
                .map(|o| (o.class, o.angle_deg))
                .map_err(|e| e.to_string());
            TiltGapCell {
                tilt_deg,
                gap0,
                outcome,
            }
        })
        .collect();
    let cells = Array2::from_shape_vec((tilts.len(), gaps.len()), cells).expect("cell count");
    Ok(TiltGapSweep {
        tilts: tilts.to_vec(),
        gaps: gaps.to_vec(),
        cells,
    })
}
