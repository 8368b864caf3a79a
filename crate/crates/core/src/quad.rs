//! Fixed-layout Gauss–Kronrod panels and polynomial extrapolation to zero.
//!
//! The panel layout never adapts to the integrand: callers that difference
//! neighbouring integrals (finite-difference forces, the `D_m` stencil) need
//! the quadrature error to vary smoothly with the parameters.

// 21-point Kronrod abscissae/weights with the embedded 10-point Gauss rule
// (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_983_240_980,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Node/weight table of the 21-point Kronrod rule on `[-1, 1]`, as
/// `(abscissa, kronrod_weight, gauss_weight)`; the Gauss weight is zero for
/// Kronrod-only nodes.
pub(crate) fn kronrod_nodes() -> [(f64, f64, f64); 21] {
    let mut out = [(0.0, 0.0, 0.0); 21];
    let mut k = 0;
    for i in 0..10 {
        let wg = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        out[k] = (-XGK[i], WGK[i], wg);
        out[k + 1] = (XGK[i], WGK[i], wg);
        k += 2;
    }
    out[20] = (0.0, WGK[10], 0.0);
    out
}

/// Integrate `f` over `[lo, hi]` with `panels` equal Kronrod panels.
///
/// `f` writes `m` values for one node (several integrands sharing one
/// evaluation). Returns the Kronrod sums and summed per-panel error
/// estimates, using the QUADPACK scaling of `|Kronrod − Gauss|`.
pub(crate) fn integrate_panels(
    lo: f64,
    hi: f64,
    panels: usize,
    m: usize,
    mut f: impl FnMut(f64, &mut [f64]),
) -> (Vec<f64>, Vec<f64>) {
    let nodes = kronrod_nodes();
    let width = (hi - lo) / panels as f64;
    let half = 0.5 * width;
    let mut total = vec![0.0; m];
    let mut err = vec![0.0; m];
    let mut vals = vec![0.0; nodes.len() * m];
    for p in 0..panels {
        let centre = lo + (p as f64 + 0.5) * width;
        for (i, &(x, _, _)) in nodes.iter().enumerate() {
            f(centre + half * x, &mut vals[i * m..(i + 1) * m]);
        }
        for j in 0..m {
            let mut k_sum = 0.0;
            let mut g_sum = 0.0;
            for (i, &(_, wk, wg)) in nodes.iter().enumerate() {
                k_sum += wk * vals[i * m + j];
                g_sum += wg * vals[i * m + j];
            }
            let mean = 0.5 * k_sum;
            let resasc: f64 = nodes
                .iter()
                .enumerate()
                .map(|(i, &(_, wk, _))| wk * (vals[i * m + j] - mean).abs())
                .sum::<f64>()
                * half;
            let diff = half * (k_sum - g_sum).abs();
            total[j] += half * k_sum;
            if resasc > 0.0 && diff > 0.0 {
                err[j] += resasc * (200.0 * diff / resasc).powf(1.5).min(1.0);
            }
        }
    }
    (total, err)
}

/// Polynomial (Neville) extrapolation of `values[i] = F(steps[i])` to `F(0)`.
///
/// Returns the extrapolated value and, as a residual, its distance from the
/// next-lower-order estimate built on the smallest steps.
pub fn extrapolate_to_zero(steps: &[f64], values: &[f64]) -> (f64, f64) {
    assert_eq!(steps.len(), values.len());
    assert!(!steps.is_empty());
    let n = steps.len();
    if n == 1 {
        return (values[0], f64::INFINITY);
    }
    let mut table = values.to_vec();
    let mut previous_order = table[n - 1];
    for j in 1..n {
        previous_order = table[n - 1];
        for i in (j..n).rev() {
            table[i] = (steps[i - j] * table[i] - steps[i] * table[i - 1]) / (steps[i - j] - steps[i]);
        }
    }
    let best = table[n - 1];
    (best, (best - previous_order).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_integrates_polynomials_exactly() {
        let (v, e) = integrate_panels(0.0, 2.0, 3, 1, |x, out| out[0] = x.powi(9) - 3.0 * x.powi(4) + 1.0);
        let exact = 2f64.powi(10) / 10.0 - 3.0 * 2f64.powi(5) / 5.0 + 2.0;
        assert!((v[0] - exact).abs() < 1e-12);
        assert!(e[0] < 1e-10);
    }

    #[test]
    fn weights_sum_to_two() {
        let n = kronrod_nodes();
        let k: f64 = n.iter().map(|t| t.1).sum();
        let g: f64 = n.iter().map(|t| t.2).sum();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn extrapolation_removes_polynomial_error() {
        // F(h) = 1 + 2h − 3h² + h³
        let steps = [0.1, 0.05, 0.025, 0.0125];
        let values: Vec<f64> = steps
            .iter()
            .map(|h| 1.0 + 2.0 * h - 3.0 * h * h + h * h * h)
            .collect();
        let (v, r) = extrapolate_to_zero(&steps, &values);
        assert!((v - 1.0).abs() < 1e-13);
        // the quadratic fit on the three smallest steps misses h1·h2·h3
        assert!((r - 0.05 * 0.025 * 0.0125).abs() < 1e-13);
    }
}
