//! Complex transverse fields on a [`Grid2D`].

use ndarray::{Array2, Zip};
use num_complex::Complex64;

use crate::error::{ensure_positive, Error, Result};
use crate::grid::Grid2D;

/// Field component treated by the propagation and mode operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    Scalar,
    /// Quasi-TE: dominant Ex, interface correction on the x second difference.
    Te,
    /// Quasi-TM: dominant Ey, interface correction on the y second difference.
    Tm,
}

impl Polarization {
    pub fn tag(self) -> u32 {
        match self {
            Polarization::Scalar => 0,
            Polarization::Te => 1,
            Polarization::Tm => 2,
        }
    }

    pub fn from_tag(tag: u32) -> Option<Self> {
        match tag {
            0 => Some(Polarization::Scalar),
            1 => Some(Polarization::Te),
            2 => Some(Polarization::Tm),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Polarization::Scalar => "scalar",
            Polarization::Te => "te",
            Polarization::Tm => "tm",
        }
    }
}

impl std::str::FromStr for Polarization {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "scalar" => Ok(Polarization::Scalar),
            "te" => Ok(Polarization::Te),
            "tm" => Ok(Polarization::Tm),
            other => Err(format!("unknown polarization `{other}` (expected scalar, te or tm)")),
        }
    }
}

/// Complex field amplitude sampled on a grid, stored `[[j, i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSlice {
    grid: Grid2D,
    values: Array2<Complex64>,
    lambda: f64,
    polarization: Polarization,
}

impl FieldSlice {
    pub fn new(
        grid: Grid2D,
        values: Array2<Complex64>,
        lambda: f64,
        polarization: Polarization,
    ) -> Result<Self> {
        ensure_positive("lambda", lambda)?;
        if values.dim() != grid.shape() {
            return Err(Error::GridMismatch(format!(
                "field array {:?} does not match grid {:?}",
                values.dim(),
                grid.shape()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Instability { z: f64::NAN });
        }
        Ok(Self {
            grid,
            values,
            lambda,
            polarization,
        })
    }

    pub fn zeros(grid: Grid2D, lambda: f64, polarization: Polarization) -> Result<Self> {
        Self::new(grid, Array2::zeros(grid.shape()), lambda, polarization)
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn(
        grid: Grid2D,
        lambda: f64,
        polarization: Polarization,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let values = Array2::from_shape_fn(grid.shape(), |(j, i)| f(grid.x(i), grid.y(j)));
        Self::new(grid, values, lambda, polarization)
    }

    /// Wraps a real array as a field.
    pub fn from_real(
        grid: Grid2D,
        values: &Array2<f64>,
        lambda: f64,
        polarization: Polarization,
    ) -> Result<Self> {
        Self::new(
            grid,
            values.mapv(|v| Complex64::new(v, 0.0)),
            lambda,
            polarization,
        )
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.values
    }

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization
    }

    pub fn with_polarization(mut self, polarization: Polarization) -> Self {
        self.polarization = polarization;
        self
    }

    /// `|E|^2` per sample.
    pub fn intensity(&self) -> Array2<f64> {
        self.values.mapv(|v| v.norm_sqr())
    }

    /// Integrated power `∫|E|^2 dx dy`.
    pub fn power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    /// Overlap `⟨self, other⟩ = ∫ self · conj(other) dx dy`.
    pub fn inner(&self, other: &FieldSlice) -> Result<Complex64> {
        self.check_compatible(other)?;
        let mut acc = Complex64::new(0.0, 0.0);
        Zip::from(&self.values)
            .and(&other.values)
            .for_each(|a, b| acc += a * b.conj());
        Ok(acc * self.grid.cell_area())
    }

    /// Copy scaled to unit power.
    pub fn normalized(&self) -> Result<FieldSlice> {
        let p = self.power();
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / p.sqrt();
        let mut out = self.clone();
        out.values.mapv_inplace(|v| v * s);
        Ok(out)
    }

    pub fn scaled(&self, factor: Complex64) -> FieldSlice {
        let mut out = self.clone();
        out.values.mapv_inplace(|v| v * factor);
        out
    }

    /// Intensity-weighted centroid `(x̄, ȳ)`.
    pub fn centroid(&self) -> Result<(f64, f64)> {
        let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
        for ((j, i), v) in self.values.indexed_iter() {
            let w = v.norm_sqr();
            sw += w;
            sx += w * self.grid.x(i);
            sy += w * self.grid.y(j);
        }
        if sw <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok((sx / sw, sy / sw))
    }

    /// Central second moments `(⟨(x-x̄)²⟩, ⟨(y-ȳ)²⟩)` of the intensity.
    pub fn second_moments(&self) -> Result<(f64, f64)> {
        let (cx, cy) = self.centroid()?;
        let (mut sw, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for ((j, i), v) in self.values.indexed_iter() {
            let w = v.norm_sqr();
            let dx = self.grid.x(i) - cx;
            let dy = self.grid.y(j) - cy;
            sw += w;
            sxx += w * dx * dx;
            syy += w * dy * dy;
        }
        Ok((sxx / sw, syy / sw))
    }

    /// Second-moment beam radii `(2σx, 2σy)`; equals the 1/e field radius of a Gaussian.
    pub fn beam_radii(&self) -> Result<(f64, f64)> {
        let (mx, my) = self.second_moments()?;
        Ok((2.0 * mx.sqrt(), 2.0 * my.sqrt()))
    }

    pub(crate) fn check_compatible(&self, other: &FieldSlice) -> Result<()> {
        if !self.grid.matches(&other.grid) {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        if (self.lambda - other.lambda).abs() > 1e-12 * self.lambda {
            return Err(Error::GridMismatch(format!(
                "wavelength {} um vs {} um",
                self.lambda, other.lambda
            )));
        }
        Ok(())
    }
}
