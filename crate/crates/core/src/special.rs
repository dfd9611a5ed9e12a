//! Bessel functions needed by the step-index fiber mode.
//!
//! `J0`, `J1` come from `libm`. The modified functions `K0`, `K1` are
//! evaluated from `K_v(x) = int_0^inf exp(-x cosh t) cosh(v t) dt` with the
//! trapezoidal rule, which converges geometrically for this integrand.

pub fn j0(x: f64) -> f64 {
    libm::j0(x)
}

pub fn j1(x: f64) -> f64 {
    libm::j1(x)
}

fn k_integral(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0, "K_nu requires x > 0");
    // exp(-x cosh t) < 1e-300 beyond this point.
    let t_max = (700.0 / x).max(1.0).acosh() + 1.0;
    let h = 0.02;
    let steps = (t_max / h).ceil() as usize;
    // Scale by e^x so large arguments do not underflow before the sum.
    let mut s = 0.5;
    for k in 1..=steps {
        let t = k as f64 * h;
        s += (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
    }
    s * h * (-x).exp()
}

pub fn k0(x: f64) -> f64 {
    k_integral(0.0, x)
}

pub fn k1(x: f64) -> f64 {
    k_integral(1.0, x)
}
