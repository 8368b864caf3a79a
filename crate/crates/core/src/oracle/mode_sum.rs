//! Discrete cavity mode sum for the time-dependent energy shift.
//!
//! The atom sits at height `d` above the `z = 0` wall of a cubic perfectly
//! conducting cavity of side `L`, laterally centred (optionally offset). For
//! each mode `k = π(l, m, n)/L` the two transverse polarizations contribute
//! `(δ_αβ − k̂_α k̂_β) f_α f_β` with the isotropic dipole average `μ_α² = μ²/3`.
//! Modes with one vanishing index carry half weight (their normalization is
//! `√(4/V)` instead of `√(8/V)`). The distance-independent free-space part is
//! removed mode by mode by replacing `sin²(k_z d)` and `cos²(k_z d)` with
//! `∓cos(2k_z d)/2`.
//!
//! Mode weights depend only on the integer `s = l² + m² + n²`, so they are
//! accumulated into a table `W[s]` and contracted with the time kernel once.
//! The sum is cut off by a Gaussian window `e^{−h x²}` (`x = 2kd`) at several
//! `h`, and extrapolated `h → 0`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::extrapolate_to_zero;
use crate::scenario::{reduce_with_exclusion, Scenario};

/// Cut-off coverage in units of the window scale.
const COVERAGE: f64 = 6.5;

/// Largest index the automatic settings will choose.
const AUTO_MAX_INDEX: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSumSettings {
    /// Cavity side `L`, in the scenario's length unit.
    pub box_side: f64,
    /// Largest mode index; modes with `l² + m² + n² ≤ N²` are summed.
    pub max_index: usize,
    /// Lateral `(x, y)` offset of the atom from the cavity axis.
    pub lateral_offset: [f64; 2],
    /// Time since the start of the evolution.
    pub time: f64,
    /// Gaussian window scale `X` in units of `x = 2kd`; windows are
    /// `e^{−j x²/X²}` for `j = 1..=window_points`.
    pub window_scale: f64,
    pub window_points: usize,
}

impl ModeSumSettings {
    /// Settings for a cavity of side `box_ratio · d`, with the window and
    /// cut-off derived from the slowest oscillation of the kernel.
    pub fn for_scenario(s: &Scenario, box_ratio: f64, time: f64) -> Result<Self> {
        let p = reduce_with_exclusion(s, time, 0.0)?;
        let omega_min = if p.a == 0.0 { 1.0 } else { (1.0 - p.a).abs().min(1.0) };
        if omega_min == 0.0 {
            return Err(Error::LightCone {
                distance: 0.0,
                half_width: 0.0,
            });
        }
        let window_scale = 15.0 / omega_min;
        let x_cover = (COVERAGE * window_scale).max(60.0 * p.x0);
        let n = (0.5 * x_cover * box_ratio / PI).ceil() as usize;
        if n > AUTO_MAX_INDEX {
            return Err(Error::Validity(format!(
                "mode sum would need max_index = {n}; too close to the light cone or too large a cavity"
            )));
        }
        Ok(ModeSumSettings {
            box_side: box_ratio * s.distance,
            max_index: n,
            lateral_offset: [0.0, 0.0],
            time,
            window_scale,
            window_points: 4,
        })
    }

    pub fn with_lateral_offset(mut self, x: f64, y: f64) -> Self {
        self.lateral_offset = [x, y];
        self
    }

    pub fn validate(&self, s: &Scenario) -> Result<()> {
        let d = s.distance;
        if !(self.box_side > 2.0 * d) {
            return Err(Error::Validity(format!(
                "box side {} must exceed twice the distance {}",
                self.box_side, d
            )));
        }
        if self.max_index < 1 {
            return Err(Error::Validity("max_index must be at least 1".into()));
        }
        if !(self.time >= 0.0) {
            return Err(Error::Validity("time must be non-negative".into()));
        }
        let limit = (self.box_side - d) / s.speed_of_light();
        if !(self.time < limit) {
            return Err(Error::Validity(format!(
                "t = {} reaches the far walls; needs t < (L - d)/c = {limit}",
                self.time
            )));
        }
        if self.lateral_offset.iter().any(|o| !(o.abs() < 0.5 * self.box_side)) {
            return Err(Error::Validity("atom must lie inside the cavity".into()));
        }
        if !(self.window_scale > 0.0) || self.window_points < 2 {
            return Err(Error::Validity("need a positive window scale and at least two windows".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSumResult {
    /// Energy shift in units of `μ²/d³`.
    pub value: f64,
    /// Window-extrapolation residual.
    pub residual: f64,
    pub max_index: usize,
    pub warnings: Vec<String>,
}

impl ModeSumResult {
    pub fn converged(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Energy shift of the excited atom from the cavity mode sum.
pub fn mode_sum_energy(s: &Scenario, settings: &ModeSumSettings) -> Result<ModeSumResult> {
    settings.validate(s)?;
    let p = reduce_with_exclusion(s, settings.time, 0.0)?;
    let (x0, a) = (p.x0, p.a);
    let d = s.distance;
    let lr = settings.box_side / d;
    let offset = [settings.lateral_offset[0] / d, settings.lateral_offset[1] / d];
    let n = settings.max_index;

    let w = mode_weights(n, lr, offset);

    let h0 = 1.0 / (settings.window_scale * settings.window_scale);
    let jn = settings.window_points;
    let mut sums = vec![0.0; jn];
    let norm = -(2.0 * PI / lr.powi(3)) * (8.0 / 3.0);
    for (si, &ws) in w.iter().enumerate().skip(1) {
        if ws == 0.0 {
            continue;
        }
        let sf = si as f64;
        let k = PI * sf.sqrt() / lr;
        let x = 2.0 * k;
        let half = (0.5 * a * (x - x0)).sin();
        let u = x - x0;
        let brace = if u == 0.0 { 0.0 } else { 2.0 * half * half / u };
        let base = norm * k * 2.0 * brace * ws / sf;
        let g = (-h0 * x * x).exp();
        let mut gj = g;
        for acc in sums.iter_mut() {
            *acc += base * gj;
            gj *= g;
        }
    }
    let steps: Vec<f64> = (1..=jn).map(|j| j as f64 * h0).collect();
    let (value, residual) = extrapolate_to_zero(&steps, &sums);

    let mut warnings = Vec::new();
    let x_cover = 2.0 * PI * n as f64 / lr;
    if (-h0 * x_cover * x_cover).exp() > 1e-12 {
        warnings.push(format!(
            "max_index {n} truncates the window: cut-off x = {x_cover:.3} against window scale {:.3}",
            settings.window_scale
        ));
    }
    if x_cover < 60.0 * x0 {
        warnings.push(format!(
            "max_index {n} gives k_max d = {:.3} below 30·x0 = {:.3}",
            0.5 * x_cover,
            30.0 * x0
        ));
    }
    Ok(ModeSumResult {
        value,
        residual,
        max_index: n,
        warnings,
    })
}

/// Polarization- and position-weighted mode counts `W[s]`, multiplied by `s`.
fn mode_weights(n: usize, lr: f64, offset: [f64; 2]) -> Vec<f64> {
    let smax = n * n;
    let mut w = vec![0.0; smax + 1];
    let k = |i: usize| i as f64 * PI / lr;
    let sq = |v: f64| v * v;
    let cx2: Vec<f64> = (0..=n).map(|i| sq((k(i) * (offset[0] + 0.5 * lr)).cos())).collect();
    let sx2: Vec<f64> = (0..=n).map(|i| sq((k(i) * (offset[0] + 0.5 * lr)).sin())).collect();
    let cy2: Vec<f64> = (0..=n).map(|i| sq((k(i) * (offset[1] + 0.5 * lr)).cos())).collect();
    let sy2: Vec<f64> = (0..=n).map(|i| sq((k(i) * (offset[1] + 0.5 * lr)).sin())).collect();
    let weight = |i: usize| if i == 0 { 0.5 } else { 1.0 };
    // z-profile at height d = 1, free part removed, times the index weight
    let zw: Vec<f64> = (0..=n).map(|i| weight(i) * 0.5 * (2.0 * k(i)).cos()).collect();
    let n2: Vec<f64> = (0..=n).map(|i| (i * i) as f64).collect();
    // equal offsets make (l, m) and (m, l) contribute identically
    let symmetric = offset[0] == offset[1];

    for l in 0..=n {
        let l2 = l * l;
        let m_start = if symmetric { l } else { 0 };
        for m in m_start..=n {
            let b = l2 + m * m;
            if b > smax {
                break;
            }
            let ca = cx2[l] * sy2[m];
            let cb = sx2[l] * cy2[m];
            let cc = sx2[l] * sy2[m];
            if ca.max(cb).max(cc) < 1e-30 {
                continue;
            }
            let mult = weight(l) * weight(m) * if symmetric && m != l { 2.0 } else { 1.0 };
            let p = mult * (cc - ca - cb);
            let q = mult * (l2 as f64 * ca + (m * m) as f64 * cb);
            let r = mult * cc;
            let nmax = isqrt(smax - b);
            let row = &mut w[b..];
            for nn in 0..=nmax {
                let s = b + nn * nn;
                row[nn * nn] += zw[nn] * (s as f64 * p + q - n2[nn] * r);
            }
        }
    }
    w[0] = 0.0;
    w
}

fn isqrt(v: usize) -> usize {
    let mut r = (v as f64).sqrt() as usize;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::UnitSystem;

    fn natural(d: f64, k0: f64) -> Scenario {
        Scenario::new(1.0, k0, d, UnitSystem::Natural).unwrap()
    }

    #[test]
    fn zero_at_t_zero() {
        let s = natural(1.0, 1.0);
        let set = ModeSumSettings::for_scenario(&s, 10.0, 0.0).unwrap();
        assert_eq!(mode_sum_energy(&s, &set).unwrap().value, 0.0);
    }

    #[test]
    fn refuses_wrap_around() {
        let s = natural(1.0, 1.0);
        let mut set = ModeSumSettings::for_scenario(&s, 10.0, 1.0).unwrap();
        set.time = 9.0;
        assert!(matches!(mode_sum_energy(&s, &set), Err(Error::Validity(_))));
        set.time = 1.0;
        set.box_side = 1.5;
        assert!(mode_sum_energy(&s, &set).is_err());
    }

    #[test]
    fn small_index_is_flagged() {
        let s = natural(1.0, 1.0);
        let mut set = ModeSumSettings::for_scenario(&s, 10.0, 1.0).unwrap();
        set.max_index = 20;
        let r = mode_sum_energy(&s, &set).unwrap();
        assert!(!r.converged());
        assert!(r.value.is_finite());
    }

    #[test]
    fn isqrt_exact() {
        for v in [0, 1, 2, 3, 4, 15, 16, 17, 1_000_000, 999_999] {
            let r = isqrt(v);
            assert!(r * r <= v && (r + 1) * (r + 1) > v);
        }
    }

    #[test]
    fn symmetric_and_general_paths_agree() {
        let w_sym = mode_weights(30, 10.0, [0.0, 0.0]);
        let w_gen = mode_weights(30, 10.0, [0.0, 1e-300]);
        for (a, b) in w_sym.iter().zip(&w_gen) {
            assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }
}
