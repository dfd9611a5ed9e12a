use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{ensure_positive, invalid, Error, Result};
use crate::fft::fft_freqs;
use crate::geometry::{ExposureSetup, MaskPattern};
use crate::grid::Grid2D;

use super::propagate::{AsmOptions, RowPropagator};

/// Exposure intensity on the resist plane, normalized to the clear field.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMap {
    grid: Grid2D,
    values: Array2<f64>,
}

impl IntensityMap {
    pub fn new(grid: Grid2D, values: Array2<f64>) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(Error::GridMismatch(format!(
                "intensity array {:?} does not match grid {:?}",
                values.dim(),
                grid.shape()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid("intensity", format!("values must be finite and >= 0, found {v}")));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

/// Knobs for [`aerial_image_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AerialOptions {
    /// RMS angular spread of the illumination (degrees); 0 disables the blur.
    pub angular_blur_deg: f64,
    pub na_max: f64,
}

impl Default for AerialOptions {
    fn default() -> Self {
        Self {
            angular_blur_deg: 0.0,
            na_max: 1.0,
        }
    }
}

/// Lateral distance beyond which the Fresnel pattern of an edge is negligible.
fn fresnel_margin(lambda: f64, gap: f64) -> f64 {
    4.0 * (lambda * gap).sqrt()
}

/// Smallest `2^a 3^b 5^c` not below `n`.
fn fft_size(n: usize) -> usize {
    let mut m = n.max(2);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Default resist-plane region for printing `mask`: at least 80 um (and four
/// long-side widths) across, with 20 um beyond each end of the footprint.
pub fn litho_grid(mask: &MaskPattern, setup: &ExposureSetup, dx: f64, dy: f64) -> Result<Grid2D> {
    ensure_positive("dx", dx)?;
    ensure_positive("dy", dy)?;
    setup.validate()?;
    let width = (4.0 * mask.w_long()).max(80.0);
    let footprint = setup.project(mask.altitude());
    let pad = 20.0;
    let nx = (width / dx).round() as usize;
    let ny = ((footprint + 2.0 * pad) / dy).round() as usize + 1;
    Grid2D::new(nx, ny, dx, dy, (-0.5 * (nx as f64 - 1.0) * dx, -pad))
}

/// Aerial image of `mask` printed through the tilted mask of `setup`.
pub fn aerial_image(mask: &MaskPattern, setup: &ExposureSetup, grid: &Grid2D) -> Result<IntensityMap> {
    aerial_image_with(mask, setup, grid, &AerialOptions::default())
}

/// Slicewise local-gap image. Row `y'` of the resist plane sees the mask
/// locally as a slit of width `w(y'/cos t)` at gap `g(y'/cos t)`; its field is
/// the laterally propagated slit times the axial factor obtained by
/// propagating the footprint `[0, L cos t]` by the same gap, which carries
/// the diffraction from the two pattern ends.
pub fn aerial_image_with(
    mask: &MaskPattern,
    setup: &ExposureSetup,
    grid: &Grid2D,
    opts: &AerialOptions,
) -> Result<IntensityMap> {
    setup.validate()?;
    if !(opts.angular_blur_deg.is_finite() && opts.angular_blur_deg >= 0.0) {
        return Err(invalid("angular_blur_deg", "must be finite and >= 0"));
    }
    if !(opts.na_max > 0.0 && opts.na_max <= 1.0) {
        return Err(invalid("na_max", "must lie in (0, 1]"));
    }
    let asm = AsmOptions {
        na_max: opts.na_max,
        band_limit: true,
    };
    let lambda = setup.lambda_uv;
    asm.check_spacing(grid.dx.max(grid.dy), lambda)?;

    let footprint = setup.project(mask.altitude());
    let y_mask = |yp: f64| setup.unproject(yp.clamp(0.0, footprint)).min(mask.altitude());
    let gap_at = |yp: f64| setup.local_gap(y_mask(yp));
    let max_gap = gap_at(0.0).max(gap_at(footprint));
    let margin = fresnel_margin(lambda, max_gap);
    let blur = opts.angular_blur_deg.to_radians().tan();

    // Lateral factor on a padded row.
    let margin_x = (margin / grid.dx).ceil() as usize;
    let nx_pad = fft_size((grid.nx + 2 * margin_x).max((4.0 * mask.w_long() / grid.dx).ceil() as usize));
    let off_x = (nx_pad - grid.nx) / 2;
    let rows = RowPropagator::new(nx_pad, grid.dx);

    // Axial factor: spectrum of the footprint on a padded column.
    let lo = grid.y0.min(0.0) - margin;
    let hi = grid.y(grid.ny - 1).max(footprint) + margin;
    let ny_pad = fft_size(((hi - lo) / grid.dy).ceil() as usize + 1);
    let y_pad = |m: usize| lo + m as f64 * grid.dy;
    let mut column: Vec<Complex64> = (0..ny_pad)
        .map(|m| {
            let y = y_pad(m);
            Complex64::new(if (0.0..=footprint).contains(&y) { 1.0 } else { 0.0 }, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(ny_pad).process(&mut column);
    let fy = fft_freqs(ny_pad, grid.dy);
    let cut_y = asm.cutoff(ny_pad, grid.dy, max_gap, lambda);
    let k0 = 1.0 / lambda;

    let lines: Vec<Vec<f64>> = (0..grid.ny)
        .into_par_iter()
        .map(|j| {
            let yp = grid.y(j);
            let gap = gap_at(yp);
            let mut row: Vec<Complex64> = (0..nx_pad)
                .map(|i| {
                    let x = grid.x0 + (i as f64 - off_x as f64) * grid.dx;
                    Complex64::new(mask.coverage(x, y_mask(yp), grid.dx), 0.0)
                })
                .collect();
            rows.propagate(&mut row, gap, lambda, &asm);
            // Axial factor at this row only, with the carrier removed so the
            // product keeps a single exp(i k g).
            let m = ((yp - lo) / grid.dy).round() as usize;
            let axial = if gap == 0.0 {
                Complex64::new(if (0.0..=footprint).contains(&yp) { 1.0 } else { 0.0 }, 0.0)
            } else {
                let mut acc = Complex64::default();
                for (k, (&c, &f)) in column.iter().zip(&fy).enumerate() {
                    if f.abs() > cut_y || c == Complex64::default() {
                        continue;
                    }
                    let arg = k0 * k0 - f * f;
                    let h = if arg >= 0.0 {
                        Complex64::from_polar(1.0, 2.0 * PI * gap * (arg.sqrt() - k0))
                    } else {
                        Complex64::from_polar((-2.0 * PI * gap * (-arg).sqrt()).exp(), -2.0 * PI * gap * k0)
                    };
                    let ph = 2.0 * PI * ((k * m) % ny_pad) as f64 / ny_pad as f64;
                    acc += c * h * Complex64::from_polar(1.0, ph);
                }
                acc / ny_pad as f64
            };
            let a2 = axial.norm_sqr();
            let mut inten: Vec<Complex64> = row.iter().map(|v| Complex64::new(v.norm_sqr() * a2, 0.0)).collect();
            let sigma = gap * blur;
            if sigma > 0.0 {
                rows.smooth(&mut inten, sigma);
            }
            (0..grid.nx).map(|i| inten[i + off_x].re.max(0.0)).collect()
        })
        .collect();
    let mut out = Array2::<f64>::zeros(grid.shape());
    for (j, line) in lines.into_iter().enumerate() {
        for (i, v) in line.into_iter().enumerate() {
            out[[j, i]] = v;
        }
    }
    if blur > 0.0 {
        out = smooth_columns(&out, grid, |j| gap_at(grid.y(j)) * blur);
    }
    IntensityMap::new(*grid, out)
}

/// Axial Gaussian smoothing with a row-dependent width.
fn smooth_columns(img: &Array2<f64>, grid: &Grid2D, sigma: impl Fn(usize) -> f64 + Sync) -> Array2<f64> {
    let (ny, nx) = img.dim();
    let mut out = img.clone();
    let rows: Vec<Vec<f64>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            let s = sigma(j) / grid.dy;
            let mut line = vec![0.0; nx];
            if s < 0.25 {
                line.copy_from_slice(img.row(j).as_slice().unwrap());
                return line;
            }
            let r = (4.0 * s).ceil() as i64;
            let mut wsum = 0.0;
            for d in -r..=r {
                let jj = j as i64 + d;
                if jj < 0 || jj >= ny as i64 {
                    continue;
                }
                let w = (-0.5 * (d as f64 / s).powi(2)).exp();
                wsum += w;
                for (o, v) in line.iter_mut().zip(img.row(jj as usize)) {
                    *o += w * v;
                }
            }
            line.iter_mut().for_each(|v| *v /= wsum);
            line
        })
        .collect();
    for (j, line) in rows.into_iter().enumerate() {
        out.row_mut(j).assign(&ndarray::ArrayView1::from(&line));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::trapezoid_mask;

    fn setup(gap0: f64, tilt: f64) -> ExposureSetup {
        ExposureSetup {
            gap0,
            tilt_deg: tilt,
            ..ExposureSetup::default()
        }
    }

    #[test]
    fn fft_sizes_are_smooth() {
        assert_eq!(fft_size(7), 8);
        assert_eq!(fft_size(1201), 1215);
        assert_eq!(fft_size(1000), 1000);
    }

    #[test]
    fn contact_print_reproduces_the_mask() {
        // Widths on cell boundaries, so every cell is fully open or closed.
        let mask = trapezoid_mask(8.0, 8.0, 200.0).unwrap();
        let su = setup(0.0, 0.0);
        let grid = litho_grid(&mask, &su, 0.2, 0.2).unwrap();
        let img = aerial_image(&mask, &su, &grid).unwrap();
        for ((j, i), &v) in img.values().indexed_iter() {
            let t = mask.transmission(grid.x(i), su.unproject(grid.y(j)));
            assert!((v - t).abs() < 1e-6, "({i}, {j}): {v} vs {t}");
        }
    }

    fn edge_width(row: &[f64], dx: f64) -> f64 {
        // Distance between the outermost 0.9 and 0.1 crossings right of the centre.
        let c = row.len() / 2;
        let lit = row[c..].iter().rposition(|&v| v >= 0.9).unwrap();
        let dark = row[c..].iter().rposition(|&v| v >= 0.1).unwrap();
        (dark - lit) as f64 * dx
    }

    #[test]
    fn edge_blur_grows_with_gap() {
        let mask = trapezoid_mask(60.0, 60.0, 400.0).unwrap();
        let mut widths = Vec::new();
        for gap in [240.0, 840.0] {
            let su = setup(gap, 0.0);
            let grid = litho_grid(&mask, &su, 0.2, 0.2).unwrap();
            let img = aerial_image(&mask, &su, &grid).unwrap();
            let mid = grid.ny / 2;
            widths.push(edge_width(img.values().row(mid).as_slice().unwrap(), grid.dx));
        }
        for (w, gap) in widths.iter().zip([240.0, 840.0]) {
            let scale = (0.405f64 * gap).sqrt();
            assert!(*w > 0.5 * scale && *w < 2.0 * scale, "{w} vs {scale}");
        }
        let ratio = widths[1] / widths[0];
        assert!((ratio / 3.5f64.sqrt() - 1.0).abs() < 0.25, "{ratio}");
    }

    #[test]
    fn tilted_mask_blur_increases_along_the_taper() {
        let mask = trapezoid_mask(30.0, 30.0, 1000.0).unwrap();
        let su = setup(100.0, 10.0);
        let grid = litho_grid(&mask, &su, 0.2, 0.2).unwrap();
        let img = aerial_image(&mask, &su, &grid).unwrap();
        // Light spilled into the geometric shadow grows like sqrt(lambda g).
        let mut last = 0.0;
        for frac in [0.2, 0.4, 0.6, 0.8] {
            let j = ((su.project(1000.0) * frac - grid.y0) / grid.dy).round() as usize;
            let spill: f64 = (0..grid.nx)
                .filter(|&i| grid.x(i).abs() > 15.0)
                .map(|i| img.values()[[j, i]] * grid.dx)
                .sum();
            assert!(spill > last, "{frac}: {spill} <= {last}");
            last = spill;
        }
    }

    #[test]
    fn crest_is_smooth_along_the_interior() {
        let mask = trapezoid_mask(7.5, 14.5, 1000.0).unwrap();
        let su = setup(500.0, 10.0);
        let grid = litho_grid(&mask, &su, 0.2, 0.2).unwrap();
        let img = aerial_image(&mask, &su, &grid).unwrap();
        let peak: Vec<f64> = img
            .values()
            .rows()
            .into_iter()
            .map(|r| r.iter().cloned().fold(0.0, f64::max))
            .collect();
        // The end diffraction leaves a fine axial ripple; 10 um averages are smooth.
        let block = (10.0 / grid.dy) as usize;
        let means: Vec<f64> = (0..)
            .map(|b| ((100.0 - grid.y0) / grid.dy) as usize + b * block)
            .take_while(|&j| grid.y(j) < 900.0)
            .map(|j| peak[j..j + block].iter().sum::<f64>() / block as f64)
            .collect();
        for w in means.windows(2) {
            assert!((w[1] - w[0]).abs() < 0.01, "{:?}", w);
        }
        let start = ((100.0 - grid.y0) / grid.dy) as usize;
        // Light spills past the ends but decays away from them.
        let before = ((-15.0 - grid.y0) / grid.dy) as usize;
        assert!(peak[before] < 0.5 * peak[start]);
    }

    #[test]
    fn angular_blur_softens_edges() {
        let mask = trapezoid_mask(20.0, 20.0, 200.0).unwrap();
        let su = setup(200.0, 0.0);
        let grid = litho_grid(&mask, &su, 0.2, 0.2).unwrap();
        let sharp = aerial_image(&mask, &su, &grid).unwrap();
        let opts = AerialOptions {
            angular_blur_deg: 1.0,
            ..AerialOptions::default()
        };
        let soft = aerial_image_with(&mask, &su, &grid, &opts).unwrap();
        assert!(soft.max() < sharp.max());
    }
}
