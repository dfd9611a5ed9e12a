use ndarray::{Array2, ArrayView2};

use crate::error::{invalid, Error, Result};

use super::develop::ResistProfile;

/// Printed-ridge taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileClass {
    FlatTop,
    HemiFrustum,
    Blurred,
}

impl ProfileClass {
    pub fn name(self) -> &'static str {
        match self {
            ProfileClass::FlatTop => "FlatTop",
            ProfileClass::HemiFrustum => "HemiFrustum",
            ProfileClass::Blurred => "Blurred",
        }
    }
}

impl std::fmt::Display for ProfileClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Grid axis the ridge runs along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TaperAxis {
    X,
    #[default]
    Y,
}

/// Thresholds of [`classify_profile`], as fractions of the resist thickness
/// unless stated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyThresholds {
    /// Largest crest variation of a flat top.
    pub flat_tol: f64,
    /// A crest below this fraction everywhere is blurred.
    pub blur_frac: f64,
    /// Median 90%-10% edge width (um) above which the ridge is blurred.
    pub edge_width_bound: f64,
    /// Crest heights below this fraction do not belong to the ridge.
    pub noise_frac: f64,
}

impl ClassifyThresholds {
    /// Default thresholds; the edge-width bound is the long side of the mask.
    pub fn for_mask_width(w_long: f64) -> Self {
        Self {
            flat_tol: 0.05,
            blur_frac: 0.5,
            edge_width_bound: w_long,
            noise_frac: 0.01,
        }
    }
}

/// Cross-sectional summary of the ridge along its axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CrestLine {
    /// Axial positions of every grid line.
    pub position: Vec<f64>,
    /// Maximum height across each line.
    pub crest: Vec<f64>,
    /// Mean of the two 90%-10% edge widths of each line; NaN off the ridge.
    pub edge_width: Vec<f64>,
    /// Width of the region within the flat tolerance of the crest.
    pub plateau: Vec<f64>,
}

const MIN_RIDGE_CELLS: usize = 10;

fn oriented(p: &ResistProfile, axis: TaperAxis) -> (ArrayView2<'_, f64>, Vec<f64>, f64) {
    let g = p.grid();
    match axis {
        TaperAxis::Y => (p.heights().view(), g.ys(), g.dx),
        TaperAxis::X => (p.heights().t(), g.xs(), g.dy),
    }
}

/// Distance from the crest at `peak` to the `level` crossing walking by `step`.
fn crossing(line: &[f64], peak: usize, level: f64, step: isize) -> Option<f64> {
    let mut k = peak as isize;
    while k + step >= 0 && ((k + step) as usize) < line.len() {
        let (a, b) = (line[k as usize], line[(k + step) as usize]);
        if b < level {
            let frac = if a > b { (a - level) / (a - b) } else { 0.0 };
            return Some(((k - peak as isize).abs() as f64) + frac);
        }
        k += step;
    }
    None
}

fn line_stats(line: &[f64], spacing: f64, flat: f64) -> (f64, f64, f64) {
    let (peak, c) = line
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let mut widths = Vec::new();
    for step in [-1isize, 1] {
        if let (Some(a), Some(b)) = (crossing(line, peak, 0.9 * c, step), crossing(line, peak, 0.1 * c, step)) {
            widths.push((b - a) * spacing);
        }
    }
    let edge = if widths.is_empty() {
        f64::INFINITY
    } else {
        widths.iter().sum::<f64>() / widths.len() as f64
    };
    let plateau = line.iter().filter(|&&v| v >= c - flat).count() as f64 * spacing;
    (c, edge, plateau)
}

/// Crest, edge width and plateau width of every line across the ridge.
pub fn crest_line(p: &ResistProfile, axis: TaperAxis, flat_tol: f64) -> CrestLine {
    let (h, position, spacing) = oriented(p, axis);
    let flat = flat_tol * p.thickness();
    let mut out = CrestLine {
        position,
        crest: Vec::with_capacity(h.nrows()),
        edge_width: Vec::with_capacity(h.nrows()),
        plateau: Vec::with_capacity(h.nrows()),
    };
    for row in h.rows() {
        let line: Vec<f64> = row.to_vec();
        let (c, e, w) = line_stats(&line, spacing, flat);
        out.crest.push(c);
        out.edge_width.push(if c > 0.0 { e } else { f64::NAN });
        out.plateau.push(w);
    }
    out
}

/// Indices `[start, end)` of the central 80% of the ridge.
fn central_ridge(crest: &[f64], floor: f64) -> Result<(usize, usize)> {
    let peak = crest.iter().cloned().fold(0.0, f64::max);
    let first = crest.iter().position(|&c| c > floor);
    let last = crest.iter().rposition(|&c| c > floor);
    let (Some(first), Some(last)) = (first, last) else {
        return Err(Error::NoRidge { peak, floor });
    };
    let cells = last - first + 1;
    if cells < MIN_RIDGE_CELLS {
        return Err(Error::DegenerateFit {
            cells,
            min: MIN_RIDGE_CELLS,
        });
    }
    let trim = (0.1 * (last - first) as f64).round() as usize;
    Ok((first + trim, last + 1 - trim))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.retain(|x| !x.is_nan());
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Assigns the printed ridge to one of the three regimes.
pub fn classify_profile(p: &ResistProfile, axis: TaperAxis, th: &ClassifyThresholds) -> Result<ProfileClass> {
    for (name, v) in [
        ("flat_tol", th.flat_tol),
        ("blur_frac", th.blur_frac),
        ("noise_frac", th.noise_frac),
    ] {
        if !(v > 0.0 && v < 1.0) {
            return Err(invalid(name, format!("must lie in (0, 1), got {v}")));
        }
    }
    let t = p.thickness();
    let line = crest_line(p, axis, th.flat_tol);
    let (a, b) = central_ridge(&line.crest, th.noise_frac * t)?;
    let crest = &line.crest[a..b];
    let top = crest.iter().cloned().fold(f64::MIN, f64::max);
    let bottom = crest.iter().cloned().fold(f64::MAX, f64::min);
    let edge = median(line.edge_width[a..b].to_vec());
    if top < th.blur_frac * t || edge > th.edge_width_bound {
        return Ok(ProfileClass::Blurred);
    }
    let spacing = match axis {
        TaperAxis::Y => p.grid().dx,
        TaperAxis::X => p.grid().dy,
    };
    let plateau = median(line.plateau[a..b].to_vec());
    if top - bottom < th.flat_tol * t && plateau >= 2.0 * spacing {
        Ok(ProfileClass::FlatTop)
    } else {
        Ok(ProfileClass::HemiFrustum)
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Angle (degrees) of the line fitted to crest height against axial
/// position over the central 80% of the ridge.
pub fn vertical_taper_angle(p: &ResistProfile, axis: TaperAxis) -> Result<f64> {
    let line = crest_line(p, axis, 0.05);
    let (a, b) = central_ridge(&line.crest, 0.01 * p.thickness())?;
    let slope = fit_slope(&line.position[a..b], &line.crest[a..b]);
    Ok(slope.atan().to_degrees())
}

/// Builds a profile from a crest function, with a flat-topped lateral
/// cross-section of the given half width; used by tests and benchmarks.
pub fn synthetic_ridge(
    grid: crate::grid::Grid2D,
    thickness: f64,
    half_width: f64,
    crest: impl Fn(f64) -> f64,
) -> Result<ResistProfile> {
    let h = Array2::from_shape_fn(grid.shape(), |(j, i)| {
        let (x, y) = (grid.x(i), grid.y(j));
        let c = crest(y).clamp(0.0, thickness);
        let d = (x.abs() - half_width).max(0.0);
        // Linear sidewalls 2 um wide.
        (c * (1.0 - d / 2.0)).max(0.0)
    });
    ResistProfile::new(grid, h, thickness)
}
