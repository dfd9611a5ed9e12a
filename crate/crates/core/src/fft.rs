//! FFT plumbing: cached 2-D transforms, frequency axes and a DST-I built on
//! the complex FFT.

use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Frequencies of an `n`-point DFT with sample spacing `d`, in FFT order.
pub fn fft_freqs(n: usize, d: f64) -> Vec<f64> {
    let scale = 1.0 / (n as f64 * d);
    (0..n)
        .map(|k| {
            let k = if k <= (n - 1) / 2 { k as i64 } else { k as i64 - n as i64 };
            k as f64 * scale
        })
        .collect()
}

/// Forward/inverse 2-D transform over `[[row, col]]` arrays of fixed shape.
/// The inverse is normalized so `inverse(forward(a)) == a`.
pub struct Fft2 {
    rows: usize,
    cols: usize,
    fwd_cols: Arc<dyn Fft<f64>>,
    inv_cols: Arc<dyn Fft<f64>>,
    fwd_rows: Arc<dyn Fft<f64>>,
    inv_rows: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            rows,
            cols,
            fwd_cols: planner.plan_fft_forward(cols),
            inv_cols: planner.plan_fft_inverse(cols),
            fwd_rows: planner.plan_fft_forward(rows),
            inv_rows: planner.plan_fft_inverse(rows),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn forward(&self, a: &mut Array2<Complex64>) {
        self.run(a, &self.fwd_cols, &self.fwd_rows);
    }

    pub fn inverse(&self, a: &mut Array2<Complex64>) {
        self.run(a, &self.inv_cols, &self.inv_rows);
        let s = 1.0 / (self.rows * self.cols) as f64;
        a.mapv_inplace(|v| v * s);
    }

    fn run(&self, a: &mut Array2<Complex64>, along_cols: &Arc<dyn Fft<f64>>, along_rows: &Arc<dyn Fft<f64>>) {
        assert_eq!(a.dim(), (self.rows, self.cols), "Fft2 shape mismatch");
        if !a.is_standard_layout() {
            *a = a.as_standard_layout().into_owned();
        }
        along_cols.process(a.as_slice_mut().expect("standard layout"));
        if self.rows > 1 {
            let mut buf = vec![Complex64::default(); self.rows];
            for mut col in a.axis_iter_mut(Axis(1)) {
                for (b, v) in buf.iter_mut().zip(col.iter()) {
                    *b = *v;
                }
                along_rows.process(&mut buf);
                for (v, b) in col.iter_mut().zip(buf.iter()) {
                    *v = *b;
                }
            }
        }
    }
}

/// Unnormalized type-I discrete sine transform of length `n`:
/// `X_k = sum_{j=1..n} x_j sin(pi j k / (n + 1))`, computed through a
/// `2(n + 1)`-point odd extension. Applying it twice scales by `(n + 1) / 2`.
pub struct Dst1 {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl Dst1 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fft: planner.plan_fft_forward(2 * (n + 1)),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Scratch buffer of the right length for [`Dst1::apply`].
    pub fn scratch(&self) -> Vec<Complex64> {
        vec![Complex64::default(); 2 * (self.n + 1)]
    }

    /// Transforms `x` in place; `buf` must come from [`Dst1::scratch`].
    pub fn apply(&self, x: &mut [Complex64], buf: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(x.len(), n);
        buf[0] = Complex64::default();
        buf[n + 1] = Complex64::default();
        for j in 0..n {
            buf[j + 1] = x[j];
            buf[2 * n + 1 - j] = -x[j];
        }
        self.fft.process(buf);
        // Y_k = -2i X_k
        for k in 0..n {
            let y = buf[k + 1];
            x[k] = Complex64::new(-0.5 * y.im, 0.5 * y.re);
        }
    }
}
