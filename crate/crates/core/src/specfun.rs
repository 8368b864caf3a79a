//! Sine and cosine integrals and their auxiliary functions.
//!
//! ```text
//! Si(x) = ∫₀ˣ sin(u)/u du
//! Ci(x) = γ + ln x + ∫₀ˣ (cos u − 1)/u du
//! f(z)  = Ci(z) sin z − (Si(z) − π/2) cos z
//! g(z)  = −Ci(z) cos z − (Si(z) − π/2) sin z
//! ```
//!
//! For `|x| ≤ 4` the Maclaurin series are summed directly. Beyond that `f` and
//! `g` come from the continued fraction of `e^{w} E₁(w)` at `w = iz`, using
//! `e^{iz} E₁(iz) = g(z) − i f(z)`. `Si` and `Ci` are then rebuilt from `f` and
//! `g`, so the auxiliary functions never suffer the cancellation that composing
//! them from `Si` and `Ci` would cause at large arguments.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{domain, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Arguments at or below this use the power series.
const SERIES_LIMIT: f64 = 4.0;

const CF_MAX_ITER: usize = 500;

/// The auxiliary pair `(f(z), g(z))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxPair {
    pub f_val: f64,
    pub g_val: f64,
    pub at: f64,
}

/// Sine integral. Odd in `x`; tends to `π/2` as `x → ∞`.
pub fn sin_integral(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("Si requires a finite argument, got {x}")));
    }
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT {
        si_series(ax)
    } else {
        let (f, g) = fg_continued_fraction(ax);
        let (s, c) = ax.sin_cos();
        FRAC_PI_2 - (f * c + g * s)
    };
    Ok(if x < 0.0 { -v } else { v })
}

/// Cosine integral for `x > 0`.
pub fn cos_integral(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!(
            "Ci requires a finite positive argument, got {x}"
        )));
    }
    Ok(if x <= SERIES_LIMIT {
        ci_series(x)
    } else {
        let (f, g) = fg_continued_fraction(x);
        let (s, c) = x.sin_cos();
        f * s - g * c
    })
}

/// `Si(x)` and `Ci(x)` together, sharing the continued fraction above the
/// series limit. Requires `x > 0`.
pub fn sici(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!(
            "sici requires a finite positive argument, got {x}"
        )));
    }
    if x <= SERIES_LIMIT {
        return Ok((si_series(x), ci_series(x)));
    }
    let (f, g) = fg_continued_fraction(x);
    let (s, c) = x.sin_cos();
    Ok((FRAC_PI_2 - (f * c + g * s), f * s - g * c))
}

/// Auxiliary functions `f(z)`, `g(z)` for `z > 0`.
pub fn aux_fg(z: f64) -> Result<AuxPair> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain(format!(
            "auxiliary functions require a finite positive argument, got {z}"
        )));
    }
    let (f_val, g_val) = if z <= SERIES_LIMIT {
        compose_fg(si_series(z), ci_series(z), z)
    } else {
        fg_continued_fraction(z)
    };
    Ok(AuxPair {
        f_val,
        g_val,
        at: z,
    })
}

/// `f` and `g` assembled from `Si` and `Ci`. Loses accuracy for large `z`;
/// exposed for cross-checks against [`aux_fg`].
pub fn compose_fg(si: f64, ci: f64, z: f64) -> (f64, f64) {
    let (s, c) = z.sin_cos();
    let shifted = si - FRAC_PI_2;
    (ci * s - shifted * c, -ci * c - shifted * s)
}

fn si_series(x: f64) -> f64 {
    // Σ (−1)ⁿ x^{2n+1} / ((2n+1)(2n+1)!)
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0_f64;
    loop {
        term *= -x2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
        n += 1.0;
        let add = term / (2.0 * n + 1.0);
        sum += add;
        if add.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn ci_series(x: f64) -> f64 {
    // γ + ln x + Σ_{n≥1} (−1)ⁿ x^{2n} / (2n (2n)!)
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut n = 0.0_f64;
    loop {
        term *= -x2 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
        n += 1.0;
        let add = term / (2.0 * n);
        sum += add;
        if add.abs() <= 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    EULER_GAMMA + x.ln() + sum
}

/// Modified Lentz evaluation of `e^{w} E₁(w)` at `w = iz`:
/// `1/(w+1− 1²/(w+3− 2²/(w+5− …)))`.
fn fg_continued_fraction(z: f64) -> (f64, f64) {
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, z);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let a = -((i * i) as f64);
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let delta = c * d;
        h *= delta;
        if (delta.re - 1.0).abs() + delta.im.abs() < 1e-17 {
            break;
        }
    }
    (-h.im, h.re)
}
