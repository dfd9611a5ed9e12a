//! Run configuration. Every key names its unit; unknown keys are errors.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use taperlith_core::analysis::{ChainOptions, FiberSpec, SourceSpec};
use taperlith_core::bpm::{apply_pml, BpmSettings, SnapshotPlan};
use taperlith_core::geometry::{trapezoid_mask, ExposureSetup, FrustumGeometry, MaskPattern};
use taperlith_core::lithosim::{AerialOptions, PrintOptions};
use taperlith_core::{Grid2D, Polarization};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub w_in_um: f64,
    pub w_out_um: f64,
    pub h_in_um: f64,
    pub h_out_um: f64,
    pub length_um: f64,
    pub n_core: f64,
    pub n_clad: f64,
    pub n_substrate: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        let g = FrustumGeometry::benchmark();
        Self {
            w_in_um: g.w_in,
            w_out_um: g.w_out,
            h_in_um: g.h_in,
            h_out_um: g.h_out,
            length_um: g.length,
            n_core: g.n_core,
            n_clad: g.n_clad,
            n_substrate: g.n_substrate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaskConfig {
    pub w_short_um: f64,
    pub w_long_um: f64,
    pub altitude_um: f64,
}

impl Default for MaskConfig {
    fn default() -> Self {
        Self {
            w_short_um: 7.5,
            w_long_um: 14.5,
            altitude_um: 1000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExposureConfig {
    pub gap0_um: f64,
    pub tilt_deg: f64,
    pub lambda_uv_um: f64,
    /// Dose fractions of the clearing dose, dimensionless.
    pub dose_clear: f64,
    pub dose_threshold: f64,
    pub resist_thickness_um: f64,
    /// Exposure time in units of the calibrated reference time.
    pub exposure_time: f64,
}

impl Default for ExposureConfig {
    fn default() -> Self {
        let s = ExposureSetup::default();
        Self {
            gap0_um: s.gap0,
            tilt_deg: s.tilt_deg,
            lambda_uv_um: s.lambda_uv,
            dose_clear: s.dose_clear,
            dose_threshold: s.dose_threshold,
            resist_thickness_um: s.resist_thickness,
            exposure_time: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LithoConfig {
    pub dx_um: f64,
    pub dy_um: f64,
    pub angular_blur_deg: f64,
    /// Every `map_stride`-th cell along each axis goes to the height-map CSV.
    pub map_stride: usize,
}

impl Default for LithoConfig {
    fn default() -> Self {
        Self {
            dx_um: 0.2,
            dy_um: 0.2,
            angular_blur_deg: 0.0,
            map_stride: 5,
        }
    }
}

/// Reference index: a number, or the launch facet mode index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NRef {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BpmConfig {
    pub lambda_um: f64,
    pub polarization: String,
    pub dx_um: f64,
    pub dy_um: f64,
    pub dz_um: f64,
    pub width_um: f64,
    pub height_um: f64,
    pub center_x_um: f64,
    pub center_y_um: f64,
    pub pml_thickness_um: f64,
    pub pml_strength: f64,
    /// `"facet"` or a number.
    pub n_ref: NRef,
    /// Propagation end; negative means the full taper length.
    pub z_end_um: f64,
    pub snapshot_z_um: Vec<f64>,
}

impl Default for BpmConfig {
    fn default() -> Self {
        let s = BpmSettings::default();
        Self {
            lambda_um: s.lambda,
            polarization: s.polarization.name().into(),
            dx_um: 0.1,
            dy_um: 0.1,
            dz_um: s.dz,
            width_um: 30.0,
            height_um: 30.0,
            center_x_um: 0.0,
            center_y_um: 5.0,
            pml_thickness_um: s.pml_thickness,
            pml_strength: s.pml_strength,
            n_ref: NRef::Keyword("facet".into()),
            z_end_um: -1.0,
            snapshot_z_um: vec![0.0, 500.0, 900.0, 1000.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceConfig {
    /// `"facet_mode"` or `"gaussian"`.
    pub kind: String,
    pub wx_um: f64,
    pub wy_um: f64,
    pub center_x_um: f64,
    pub center_y_um: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            kind: "facet_mode".into(),
            wx_um: 1.5,
            wy_um: 1.0,
            center_x_um: 0.0,
            center_y_um: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiberConfig {
    pub core_diameter_um: f64,
    pub n1: f64,
    pub n2: f64,
    pub center_x_um: f64,
    pub center_y_um: f64,
}

impl Default for FiberConfig {
    fn default() -> Self {
        let f = FiberSpec::default();
        Self {
            core_diameter_um: f.core_diameter,
            n1: f.n1,
            n2: f.n2,
            center_x_um: f.center.0,
            center_y_um: f.center.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Sweeps to run: `"wavelength"`, `"tilt_gap"`.
    pub run: Vec<String>,
    pub wavelengths_um: Vec<f64>,
    pub tilts_deg: Vec<f64>,
    pub gaps_um: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            run: vec!["wavelength".into(), "tilt_gap".into()],
            wavelengths_um: (0..7).map(|k| 1.26 + 0.07 * k as f64).collect(),
            tilts_deg: vec![5.0, 8.0, 10.0, 15.0],
            gaps_um: vec![120.0, 240.0, 500.0, 840.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Used when neither `--out` nor `TAPERLITH_OUT_DIR` is given.
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: "taperlith-out".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub mask: MaskConfig,
    pub exposure: ExposureConfig,
    pub litho: LithoConfig,
    pub bpm: BpmConfig,
    pub source: SourceConfig,
    pub fiber: FiberConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

fn cfg<T>(r: taperlith_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Config(e.to_string()))
}

fn parse_polarization(s: &str) -> Result<Polarization, CliError> {
    match s {
        "scalar" => Ok(Polarization::Scalar),
        "te" => Ok(Polarization::Te),
        "tm" => Ok(Polarization::Tm),
        other => Err(CliError::Config(format!(
            "bpm.polarization: expected \"scalar\", \"te\" or \"tm\", got {other:?}"
        ))),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let c: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Fully expanded configuration text.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of [`RunConfig::to_toml`], hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.to_toml().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Checks every section against the library invariants.
    pub fn validate(&self) -> Result<(), CliError> {
        self.frustum()?;
        self.mask()?;
        self.exposure()?;
        self.print_options()?;
        let s = self.bpm_settings()?;
        let g = self.bpm_grid()?;
        cfg(apply_pml(&s, &g))?;
        self.source()?;
        self.fiber()?;
        self.chain_options()?;
        if self.litho.map_stride == 0 {
            return Err(CliError::Config("litho.map_stride must be >= 1".into()));
        }
        for r in &self.sweep.run {
            let (axis, name) = match r.as_str() {
                "wavelength" => (&self.sweep.wavelengths_um, "sweep.wavelengths_um"),
                "tilt_gap" => {
                    if self.sweep.gaps_um.is_empty() {
                        return Err(CliError::Config("sweep.gaps_um is empty".into()));
                    }
                    (&self.sweep.tilts_deg, "sweep.tilts_deg")
                }
                other => {
                    return Err(CliError::Config(format!(
                        "sweep.run: unknown sweep {other:?} (expected \"wavelength\" or \"tilt_gap\")"
                    )))
                }
            };
            if axis.is_empty() {
                return Err(CliError::Config(format!("{name} is empty")));
            }
        }
        for (name, axis) in [
            ("sweep.wavelengths_um", &self.sweep.wavelengths_um),
            ("sweep.tilts_deg", &self.sweep.tilts_deg),
            ("sweep.gaps_um", &self.sweep.gaps_um),
        ] {
            if axis.windows(2).any(|w| !(w[1] > w[0])) || axis.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be finite and strictly increasing")));
            }
        }
        if self.sweep.wavelengths_um.iter().any(|&l| l <= 0.0) {
            return Err(CliError::Config("sweep.wavelengths_um must be positive".into()));
        }
        Ok(())
    }

    pub fn frustum(&self) -> Result<FrustumGeometry, CliError> {
        let g = &self.geometry;
        cfg(FrustumGeometry::new(
            g.w_in_um,
            g.w_out_um,
            g.h_in_um,
            g.h_out_um,
            g.length_um,
            g.n_core,
            g.n_clad,
            g.n_substrate,
        ))
    }

    pub fn mask(&self) -> Result<MaskPattern, CliError> {
        let m = &self.mask;
        cfg(trapezoid_mask(m.w_short_um, m.w_long_um, m.altitude_um))
    }

    pub fn exposure(&self) -> Result<ExposureSetup, CliError> {
        let e = &self.exposure;
        let s = ExposureSetup {
            gap0: e.gap0_um,
            tilt_deg: e.tilt_deg,
            lambda_uv: e.lambda_uv_um,
            dose_clear: e.dose_clear,
            dose_threshold: e.dose_threshold,
            resist_thickness: e.resist_thickness_um,
        };
        cfg(s.validate())?;
        Ok(s)
    }

    pub fn print_options(&self) -> Result<PrintOptions, CliError> {
        let l = &self.litho;
        if !(self.exposure.exposure_time.is_finite() && self.exposure.exposure_time > 0.0) {
            return Err(CliError::Config("exposure.exposure_time must be > 0".into()));
        }
        if !(l.dx_um > 0.0 && l.dy_um > 0.0) {
            return Err(CliError::Config("litho.dx_um and litho.dy_um must be > 0".into()));
        }
        if !(l.angular_blur_deg.is_finite() && l.angular_blur_deg >= 0.0) {
            return Err(CliError::Config("litho.angular_blur_deg must be >= 0".into()));
        }
        Ok(PrintOptions {
            dx: l.dx_um,
            dy: l.dy_um,
            exposure_time: self.exposure.exposure_time,
            aerial: AerialOptions {
                angular_blur_deg: l.angular_blur_deg,
                ..AerialOptions::default()
            },
        })
    }

    /// Settings with `n_ref` resolved to a number when given as one.
    pub fn bpm_settings(&self) -> Result<BpmSettings, CliError> {
        let b = &self.bpm;
        let n_ref = match &b.n_ref {
            NRef::Value(v) => *v,
            NRef::Keyword(k) if k == "facet" => BpmSettings::default().n_ref,
            NRef::Keyword(k) => {
                return Err(CliError::Config(format!(
                    "bpm.n_ref: expected a number or \"facet\", got {k:?}"
                )))
            }
        };
        let s = BpmSettings {
            dz: b.dz_um,
            n_ref,
            lambda: b.lambda_um,
            polarization: parse_polarization(&b.polarization)?,
            pml_thickness: b.pml_thickness_um,
            pml_strength: b.pml_strength,
        };
        cfg(s.validate())?;
        Ok(s)
    }

    pub fn bpm_grid(&self) -> Result<Grid2D, CliError> {
        let b = &self.bpm;
        cfg(Grid2D::covering(
            b.width_um,
            b.height_um,
            b.dx_um,
            b.dy_um,
            (b.center_x_um, b.center_y_um),
        ))
    }

    pub fn source(&self) -> Result<SourceSpec, CliError> {
        let s = &self.source;
        match s.kind.as_str() {
            "facet_mode" => Ok(SourceSpec::FacetMode),
            "gaussian" => {
                if !(s.wx_um > 0.0 && s.wy_um > 0.0) {
                    return Err(CliError::Config("source.wx_um and source.wy_um must be > 0".into()));
                }
                Ok(SourceSpec::Gaussian {
                    wx: s.wx_um,
                    wy: s.wy_um,
                    center: (s.center_x_um, s.center_y_um),
                })
            }
            other => Err(CliError::Config(format!(
                "source.kind: expected \"facet_mode\" or \"gaussian\", got {other:?}"
            ))),
        }
    }

    pub fn fiber(&self) -> Result<FiberSpec, CliError> {
        let f = &self.fiber;
        if !(f.core_diameter_um > 0.0 && f.n1 > f.n2 && f.n2 >= 1.0) {
            return Err(CliError::Config(
                "fiber: need core_diameter_um > 0 and n1 > n2 >= 1".into(),
            ));
        }
        Ok(FiberSpec {
            core_diameter: f.core_diameter_um,
            n1: f.n1,
            n2: f.n2,
            center: (f.center_x_um, f.center_y_um),
        })
    }

    pub fn z_end(&self) -> Result<f64, CliError> {
        let length = self.geometry.length_um;
        let z = if self.bpm.z_end_um < 0.0 { length } else { self.bpm.z_end_um };
        if !(z.is_finite() && z <= length) {
            return Err(CliError::Config(format!("bpm.z_end_um: {z} um exceeds the taper length {length} um")));
        }
        Ok(z)
    }

    pub fn chain_options(&self) -> Result<ChainOptions, CliError> {
        let z_end = self.z_end()?;
        let snaps: Vec<f64> = self.bpm.snapshot_z_um.clone();
        if let Some(bad) = snaps.iter().find(|&&z| !(z.is_finite() && (0.0..=z_end).contains(&z))) {
            return Err(CliError::Config(format!(
                "bpm.snapshot_z_um: {bad} um is outside [0, {z_end}] um"
            )));
        }
        Ok(ChainOptions {
            n_ref_from_facet: matches!(&self.bpm.n_ref, NRef::Keyword(_)),
            snapshots: SnapshotPlan::At(snaps),
            z_end: Some(z_end),
        })
    }
}
