use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldSlice, Polarization};
use crate::geometry::IndexMap;
use crate::grid::Grid2D;
use crate::linalg::thomas;

use super::pml::{apply_pml, PmlProfile};
use super::BpmSettings;

/// Per-line tridiagonal factors of the half-operator `B = D2 + V / 2`,
/// stored for the implicit side `(1 - alpha B)` and the explicit side
/// `(1 + alpha B)`.
#[derive(Debug, Clone, Default)]
struct LineOps {
    lo: Vec<Complex64>,
    di: Vec<Complex64>,
    up: Vec<Complex64>,
}

/// Order of the two directional sweeps within a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOrder {
    XThenY,
    YThenX,
}

/// Reusable Crank-Nicolson stepper on a fixed grid.
pub(crate) struct Stepper {
    grid: Grid2D,
    settings: BpmSettings,
    pml: PmlProfile,
    /// Index values the operators were built for.
    cached: Option<Array2<f64>>,
    /// Row operators, `[j * nx + i]`.
    x_ops: LineOps,
    /// Column operators, transposed layout `[i * ny + j]`.
    y_ops: LineOps,
}

/// Interface weights `(left, centre_left, centre_right, right)` at position
/// `k` of a line of squared indices.
fn weights(n2: &[f64], k: usize, interface: bool) -> (f64, f64, f64, f64) {
    if !interface {
        return (1.0, 1.0, 1.0, 1.0);
    }
    let c = n2[k];
    let l = if k > 0 { n2[k - 1] } else { c };
    let r = if k + 1 < n2.len() { n2[k + 1] } else { c };
    (2.0 * l / (c + l), 2.0 * c / (c + l), 2.0 * c / (c + r), 2.0 * r / (c + r))
}

/// Builds `B` along one line: stretched second difference plus half the
/// potential.
#[allow(clippy::too_many_arguments)]
fn build_line(
    n2: &[f64],
    half_v: &[f64],
    s: &[f64],
    s_half: &[f64],
    d: f64,
    interface: bool,
    lo: &mut [Complex64],
    di: &mut [Complex64],
    up: &mut [Complex64],
) {
    let inv = 1.0 / (d * d);
    for k in 0..n2.len() {
        let (wl, cl, cr, wr) = weights(n2, k, interface);
        let sc = PmlProfile::stretch(s[k]);
        let sl = PmlProfile::stretch(s_half[k]);
        let sr = PmlProfile::stretch(s_half[k + 1]);
        let fl = Complex64::new(inv, 0.0) / (sc * sl);
        let fr = Complex64::new(inv, 0.0) / (sc * sr);
        lo[k] = fl * wl;
        up[k] = fr * wr;
        di[k] = -(fl * cl + fr * cr) + half_v[k];
    }
}

impl Stepper {
    pub(crate) fn new(grid: Grid2D, settings: BpmSettings) -> Result<Self> {
        settings.validate()?;
        let pml = apply_pml(&settings, &grid)?;
        Ok(Self {
            grid,
            settings,
            pml,
            cached: None,
            x_ops: LineOps::default(),
            y_ops: LineOps::default(),
        })
    }

    pub(crate) fn pml(&self) -> &PmlProfile {
        &self.pml
    }

    fn prepare(&mut self, index: &IndexMap) -> Result<()> {
        if !index.grid().matches(&self.grid) {
            return Err(Error::GridMismatch(format!(
                "index grid {:?} vs field grid {:?}",
                index.grid(),
                self.grid
            )));
        }
        if self.cached.as_ref() == Some(index.values()) {
            return Ok(());
        }
        self.pml.check_clear_of_core(index)?;
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let k0 = self.settings.k0();
        let nr2 = self.settings.n_ref * self.settings.n_ref;
        let n2: Vec<f64> = index.values().iter().map(|v| v * v).collect();
        let half_v: Vec<f64> = n2.iter().map(|m| 0.5 * k0 * k0 * (m - nr2)).collect();
        let (ix, iy) = match self.settings.polarization {
            Polarization::Scalar => (false, false),
            Polarization::Te => (true, false),
            Polarization::Tm => (false, true),
        };
        let len = nx * ny;
        let zero = Complex64::default();
        let mut x = LineOps {
            lo: vec![zero; len],
            di: vec![zero; len],
            up: vec![zero; len],
        };
        for j in 0..ny {
            let r = j * nx..(j + 1) * nx;
            build_line(
                &n2[r.clone()],
                &half_v[r.clone()],
                &self.pml.sx,
                &self.pml.sx_half,
                self.grid.dx,
                ix,
                &mut x.lo[r.clone()],
                &mut x.di[r.clone()],
                &mut x.up[r],
            );
        }
        let mut y = LineOps {
            lo: vec![zero; len],
            di: vec![zero; len],
            up: vec![zero; len],
        };
        let mut col_n2 = vec![0.0; ny];
        let mut col_v = vec![0.0; ny];
        for i in 0..nx {
            for j in 0..ny {
                col_n2[j] = n2[j * nx + i];
                col_v[j] = half_v[j * nx + i];
            }
            let r = i * ny..(i + 1) * ny;
            build_line(
                &col_n2,
                &col_v,
                &self.pml.sy,
                &self.pml.sy_half,
                self.grid.dy,
                iy,
                &mut y.lo[r.clone()],
                &mut y.di[r.clone()],
                &mut y.up[r],
            );
        }
        self.x_ops = x;
        self.y_ops = y;
        self.cached = Some(index.values().clone());
        Ok(())
    }

    /// Applies `(1 - a B)^-1 (1 + a B)` to every line of `data`, laid out as
    /// consecutive lines of length `n`.
    fn sweep(ops: &LineOps, data: &mut [Complex64], n: usize, alpha: Complex64) {
        let one = Complex64::new(1.0, 0.0);
        data.par_chunks_mut(n)
            .zip(ops.lo.par_chunks(n))
            .zip(ops.di.par_chunks(n))
            .zip(ops.up.par_chunks(n))
            .for_each_init(
                || vec![Complex64::default(); 5 * n],
                |buf, (((line, lo), di), up)| {
                    let (rhs, rest) = buf.split_at_mut(n);
                    let (l, rest) = rest.split_at_mut(n);
                    let (d, rest) = rest.split_at_mut(n);
                    let (u, scratch) = rest.split_at_mut(n);
                    for k in 0..n {
                        let mut b = di[k] * line[k];
                        if k > 0 {
                            b += lo[k] * line[k - 1];
                        }
                        if k + 1 < n {
                            b += up[k] * line[k + 1];
                        }
                        rhs[k] = line[k] + alpha * b;
                        l[k] = -alpha * lo[k];
                        d[k] = one - alpha * di[k];
                        u[k] = -alpha * up[k];
                    }
                    thomas(l, d, u, rhs, scratch);
                    line.copy_from_slice(rhs);
                },
            );
    }

    /// Advances `field` by `dz` through `index`.
    pub(crate) fn step(
        &mut self,
        field: &mut Array2<Complex64>,
        index: &IndexMap,
        dz: f64,
        order: SweepOrder,
    ) -> Result<()> {
        self.prepare(index)?;
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let k0 = self.settings.k0();
        // dE/dz = -i / (2 k0 n_ref) L E, half step each side.
        let alpha = Complex64::new(0.0, -dz / (4.0 * k0 * self.settings.n_ref));
        let do_x = |f: &mut Array2<Complex64>, ops: &LineOps| {
            Self::sweep(ops, f.as_slice_mut().expect("standard layout"), nx, alpha);
        };
        let do_y = |f: &mut Array2<Complex64>, ops: &LineOps| {
            let mut t = f.t().as_standard_layout().into_owned();
            Self::sweep(ops, t.as_slice_mut().expect("standard layout"), ny, alpha);
            f.assign(&t.t());
        };
        match order {
            SweepOrder::XThenY => {
                do_x(field, &self.x_ops);
                do_y(field, &self.y_ops);
            }
            SweepOrder::YThenX => {
                do_y(field, &self.y_ops);
                do_x(field, &self.x_ops);
            }
        }
        if field.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Instability { z: index.z() });
        }
        Ok(())
    }
}

/// One Crank-Nicolson step of `field` through `index` (x sweep first).
pub fn bpm_step(field: &FieldSlice, index: &IndexMap, settings: &BpmSettings) -> Result<FieldSlice> {
    bpm_step_ordered(field, index, settings, SweepOrder::XThenY)
}

pub fn bpm_step_ordered(
    field: &FieldSlice,
    index: &IndexMap,
    settings: &BpmSettings,
    order: SweepOrder,
) -> Result<FieldSlice> {
    check_field(field, settings)?;
    let mut stepper = Stepper::new(*field.grid(), *settings)?;
    let mut values = field.values().as_standard_layout().into_owned();
    stepper.step(&mut values, index, settings.dz, order)?;
    FieldSlice::new(*field.grid(), values, field.lambda(), field.polarization())
}

pub(crate) fn check_field(field: &FieldSlice, settings: &BpmSettings) -> Result<()> {
    if (field.lambda() - settings.lambda).abs() > 1e-12 * settings.lambda {
        return Err(Error::GridMismatch(format!(
            "field wavelength {} um vs settings {} um",
            field.lambda(),
            settings.lambda
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::uniform_index_map;

    #[test]
    fn homogeneous_medium_only_changes_phase_at_the_centre() {
        let g = Grid2D::centered(81, 81, 0.5, 0.5, (0.0, 0.0)).unwrap();
        let s = BpmSettings {
            n_ref: 1.445,
            pml_thickness: 0.0,
            polarization: Polarization::Scalar,
            ..BpmSettings::default()
        };
        let f = FieldSlice::from_fn(g, 1.55, Polarization::Scalar, |x, y| {
            Complex64::new((-(x * x + y * y) / 1.0e4).exp(), 0.0)
        })
        .unwrap();
        let map = uniform_index_map(&g, 1.445).unwrap();
        let out = bpm_step(&f, &map, &s).unwrap();
        let (a, b) = (f.values()[[40, 40]].norm(), out.values()[[40, 40]].norm());
        assert!(((b - a) / a).abs() < 1e-9, "{a} {b}");
    }

    #[test]
    fn rejects_mismatched_grids() {
        let g = Grid2D::centered(20, 20, 0.2, 0.2, (0.0, 0.0)).unwrap();
        let h = Grid2D::centered(21, 20, 0.2, 0.2, (0.0, 0.0)).unwrap();
        let f = FieldSlice::zeros(g, 1.55, Polarization::Scalar).unwrap();
        let map = uniform_index_map(&h, 1.445).unwrap();
        let s = BpmSettings {
            pml_thickness: 0.0,
            ..BpmSettings::default()
        };
        assert!(matches!(bpm_step(&f, &map, &s), Err(Error::GridMismatch(_))));
    }
}
