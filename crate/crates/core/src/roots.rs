//! Bracketing, bisection and golden-section search on sampled functions.

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Intervals `[lo, hi]` of width at most `step` over which `f` changes sign.
/// An exact zero at a grid point yields a degenerate bracket around it.
pub fn sign_changes(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let h = (hi - lo) / n as f64;
    let mut out = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..=n {
        let x = if i == n { hi } else { lo + i as f64 * h };
        let fx = f(x);
        if f_prev == 0.0 {
            out.push((x_prev, x_prev));
        } else if fx.is_finite() && f_prev.is_finite() && (f_prev < 0.0) != (fx < 0.0) && fx != 0.0 {
            out.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    if f_prev == 0.0 {
        out.push((hi, hi));
    }
    out
}

/// Bisection on a sign-changing bracket down to width `tol`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Interior local maxima of `f`, located on a grid of spacing `step` and
/// refined by golden section.
pub fn local_maxima(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64, tol: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil().max(2.0) as usize;
    let h = (hi - lo) / n as f64;
    let vals: Vec<f64> = (0..=n).map(|i| f(lo + i as f64 * h)).collect();
    (1..n)
        .filter(|&i| vals[i] > vals[i - 1] && vals[i] >= vals[i + 1])
        .map(|i| {
            let a = lo + (i - 1) as f64 * h;
            golden_max(&f, a, a + 2.0 * h, tol)
        })
        .collect()
}
