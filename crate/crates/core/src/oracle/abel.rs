//! Abel-regularized quadrature of the continuum energy integral
//!
//! ```text
//! e(x0, a) = −1/(12π) ∫₀^∞ N(x) {1 − cos[a(x − x0)]}/(x − x0) dx,
//! N(x) = −2x cos x + (2 − x²) sin x,
//! ```
//!
//! with the damping factor `e^{−εx}` and polynomial extrapolation `ε → 0`.
//! The brace `{1 − cos(au)}/u = 2 sin²(au/2)/u` is evaluated in that
//! cancellation-free form, so the pole needs no special branch.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::{extrapolate_to_zero, integrate_panels};
use crate::scenario::DEFAULT_EXCLUSION;

const PREFACTOR: f64 = -1.0 / (12.0 * PI);

/// Most panels a single plan may request.
const MAX_PANELS: usize = 4_000_000;

/// How an energy value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnergyMethod {
    Quadrature,
    OperatorForm,
    ModeSum,
}

/// Dimensionless energy shift `ΔE d³/μ²` with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyShiftResult {
    pub value: f64,
    /// Extrapolation residual plus the panel error estimate.
    pub residual: f64,
    pub method: EnergyMethod,
}

/// Damping times `x0` at the top of the ladder stays below `0.1·LADDER_REACH`.
const LADDER_REACH: f64 = 2.0;

/// Regularization and truncation parameters for the quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// Abel damping ladder in units of the slowest oscillation frequency of
    /// the integrand, or of `2/x0` when that is smaller; strictly decreasing.
    pub epsilon_ladder: Vec<f64>,
    /// Truncation point; `None` selects `max(50·x0, 40/ε_min)`.
    pub x_max: Option<f64>,
    /// Panel width in `x`; `None` selects `min(2, 2π/ω_max)`.
    pub panel_width: Option<f64>,
    /// Bound on the summed Kronrod–Gauss panel differences, relative to
    /// `max(1, |value|)`.
    pub panel_tolerance: f64,
    /// Degree of the extrapolating polynomial; uses the last `order + 1`
    /// ladder entries.
    pub extrapolation_order: usize,
    /// Extrapolation residual above this (relative to `max(1, |value|)`)
    /// is a convergence failure.
    pub residual_tolerance: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            epsilon_ladder: vec![0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125],
            x_max: None,
            panel_width: None,
            panel_tolerance: 1e-8,
            extrapolation_order: 5,
            residual_tolerance: 1e-6,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        let l = &self.epsilon_ladder;
        if l.is_empty() || l.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return Err(Error::Validity("epsilon ladder must be non-empty and positive".into()));
        }
        if l.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Validity("epsilon ladder must be strictly decreasing".into()));
        }
        if self.extrapolation_order == 0 || self.extrapolation_order >= l.len() {
            return Err(Error::Validity(format!(
                "extrapolation order {} needs between 1 and {} for a ladder of {}",
                self.extrapolation_order,
                l.len() - 1,
                l.len()
            )));
        }
        if let Some(w) = self.panel_width {
            if !(w > 0.0) {
                return Err(Error::Validity("panel width must be positive".into()));
            }
        }
        if !(self.panel_tolerance > 0.0) || !(self.residual_tolerance > 0.0) {
            return Err(Error::Validity("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Resolve the ladder, truncation and panel count for an integrand whose
    /// oscillation frequencies lie in `[omega_min, omega_max]` and whose
    /// structure extends to `x0`.
    pub fn plan(&self, x0: f64, omega_min: f64, omega_max: f64) -> Result<QuadraturePlan> {
        self.validate()?;
        if !(omega_min > 0.0) {
            return Err(domain("quadrature needs a positive slowest frequency"));
        }
        let scale = omega_min.min(LADDER_REACH / x0);
        let epsilons: Vec<f64> = self.epsilon_ladder.iter().map(|e| e * scale).collect();
        let eps_min = *epsilons.last().unwrap();
        let x_max = match self.x_max {
            Some(x) => {
                if !(x >= 10.0 * x0) {
                    return Err(Error::Validity(format!(
                        "x_max = {x} must be at least 10·x0 = {}",
                        10.0 * x0
                    )));
                }
                x
            }
            None => (50.0 * x0).max(40.0 / eps_min),
        };
        let width = self
            .panel_width
            .unwrap_or_else(|| (2.0 * PI / omega_max).min(2.0));
        let panels = (x_max / width).ceil() as usize;
        if panels > MAX_PANELS {
            return Err(Error::Validity(format!(
                "quadrature would need {panels} panels; the point is too close to the light cone"
            )));
        }
        Ok(QuadraturePlan {
            epsilons,
            x_max,
            panels,
            order: self.extrapolation_order,
            panel_tolerance: self.panel_tolerance,
            residual_tolerance: self.residual_tolerance,
        })
    }

    /// Plan suited to `e(x0, a)` itself.
    pub fn plan_for(&self, x0: f64, a: f64) -> Result<QuadraturePlan> {
        check_point(x0, a)?;
        self.plan(x0, slowest_frequency(a)?, 1.0 + a)
    }
}

/// A fully resolved quadrature layout. Reusing one plan at neighbouring
/// parameters keeps the discretization error smooth under differencing.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraturePlan {
    /// Absolute damping rates.
    pub epsilons: Vec<f64>,
    pub x_max: f64,
    pub panels: usize,
    pub order: usize,
    pub panel_tolerance: f64,
    pub residual_tolerance: f64,
}

impl QuadraturePlan {
    /// Integrate `k` integrands `g_i(x)` against every ladder damping,
    /// returning `[i][j]` ladder values and the worst panel error.
    fn ladder(&self, k: usize, lo: f64, hi: f64, panels: usize, g: impl Fn(f64, &mut [f64])) -> (Vec<Vec<f64>>, f64) {
        let l = self.epsilons.len();
        let eps = &self.epsilons;
        let mut base = vec![0.0; k];
        let mut damp = vec![0.0; l];
        let (tot, err) = integrate_panels(lo, hi, panels, k * l, |x, out| {
            g(x, &mut base);
            damp[l - 1] = (-eps[l - 1] * x).exp();
            for j in (0..l - 1).rev() {
                damp[j] = if eps[j] == 2.0 * eps[j + 1] {
                    damp[j + 1] * damp[j + 1]
                } else {
                    (-eps[j] * x).exp()
                };
            }
            for i in 0..k {
                for j in 0..l {
                    out[i * l + j] = base[i] * damp[j];
                }
            }
        });
        let rows = (0..k).map(|i| tot[i * l..(i + 1) * l].to_vec()).collect();
        let worst = err.iter().copied().fold(0.0, f64::max);
        (rows, worst)
    }

    /// Extrapolate one ladder row to zero damping.
    fn extrapolate(&self, row: &[f64]) -> (f64, f64) {
        let start = self.epsilons.len() - self.order - 1;
        extrapolate_to_zero(&self.epsilons[start..], &row[start..])
    }

    fn check(&self, what: &'static str, value: f64, residual: f64, panel_err: f64) -> Result<()> {
        let scale = value.abs().max(1.0);
        if !(residual <= self.residual_tolerance * scale) {
            return Err(Error::Convergence {
                what,
                residual,
                tolerance: self.residual_tolerance * scale,
            });
        }
        if !(panel_err <= self.panel_tolerance * scale) {
            return Err(Error::Convergence {
                what,
                residual: panel_err,
                tolerance: self.panel_tolerance * scale,
            });
        }
        Ok(())
    }

    /// `e(x0, a)` on this plan.
    pub fn energy(&self, x0: f64, a: f64) -> Result<EnergyShiftResult> {
        check_point(x0, a)?;
        if a == 0.0 {
            return Ok(EnergyShiftResult {
                value: 0.0,
                residual: 0.0,
                method: EnergyMethod::Quadrature,
            });
        }
        let (rows, panel_err) = self.ladder(1, 0.0, self.x_max, self.panels, |x, out| {
            let (s, c) = x.sin_cos();
            out[0] = (-2.0 * x * c + (2.0 - x * x) * s) * brace(a, x - x0);
        });
        let (v, r) = self.extrapolate(&rows[0]);
        let value = PREFACTOR * v;
        let residual = (PREFACTOR * r).abs();
        let panel_err = (PREFACTOR * panel_err).abs();
        self.check("energy quadrature", value, residual, panel_err)?;
        Ok(EnergyShiftResult {
            value,
            residual: residual + panel_err,
            method: EnergyMethod::Quadrature,
        })
    }

    /// `I(m) = ∫ sin(mx) {1 − cos[a(x − x0)]}/(x − x0) dx` for each `m`,
    /// extrapolated; returns values and the largest residual.
    fn sine_moments(&self, x0: f64, a: f64, ms: &[f64]) -> Result<(Vec<f64>, f64)> {
        let (rows, panel_err) = self.ladder(ms.len(), 0.0, self.x_max, self.panels, |x, out| {
            let b = brace(a, x - x0);
            for (o, m) in out.iter_mut().zip(ms) {
                *o = (m * x).sin() * b;
            }
        });
        let mut values = Vec::with_capacity(ms.len());
        let mut worst: f64 = 0.0;
        for row in &rows {
            let (v, r) = self.extrapolate(row);
            values.push(v);
            worst = worst.max(r);
        }
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        self.check("operator-form moments", scale, worst, panel_err)?;
        Ok((values, worst + panel_err))
    }

    /// Static energy `−1/(12π) PV∫₀^∞ N(x)/(x − x0) dx`, the brace replaced by 1.
    pub fn static_energy(&self, x0: f64) -> Result<EnergyShiftResult> {
        check_point(x0, 0.0)?;
        let n0 = n_of(x0);
        let (s0, c0) = x0.sin_cos();
        let dn0 = -x0 * x0 * c0;
        let ddn0 = -2.0 * x0 * c0 + x0 * x0 * s0;
        let split = 2.0 * x0;
        let near_panels = ((split / self.x_max) * self.panels as f64).ceil().max(1.0) as usize;
        // Symmetric window around the pole: the PV of N(x0)/(x − x0) over
        // [0, 2x0] vanishes, leaving a regular difference quotient.
        let (near, e1) = self.ladder(1, 0.0, split, near_panels, |x, out| {
            let u = x - x0;
            out[0] = if u.abs() < 1e-5 {
                dn0 + 0.5 * ddn0 * u
            } else {
                (n_of(x) - n0) / u
            };
        });
        let far_hi = self.x_max.max(2.0 * split);
        let far_panels = (((far_hi - split) / self.x_max) * self.panels as f64).ceil() as usize;
        let (far, e2) = self.ladder(1, split, far_hi, far_panels, |x, out| {
            out[0] = n_of(x) / (x - x0);
        });
        let row: Vec<f64> = near[0].iter().zip(&far[0]).map(|(a, b)| a + b).collect();
        let (v, r) = self.extrapolate(&row);
        let value = PREFACTOR * v;
        let residual = (PREFACTOR * r).abs();
        let panel_err = (PREFACTOR * (e1 + e2)).abs();
        self.check("static energy quadrature", value, residual, panel_err)?;
        Ok(EnergyShiftResult {
            value,
            residual: residual + panel_err,
            method: EnergyMethod::Quadrature,
        })
    }
}

fn n_of(x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    -2.0 * x * c + (2.0 - x * x) * s
}

/// `{1 − cos(au)}/u`.
#[inline]
fn brace(a: f64, u: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let s = (0.5 * a * u).sin();
    2.0 * s * s / u
}

fn check_point(x0: f64, a: f64) -> Result<()> {
    if !(x0 > 0.0) || !x0.is_finite() {
        return Err(domain(format!("x0 must be positive and finite, got {x0}")));
    }
    if !(a >= 0.0) || !a.is_finite() {
        return Err(domain(format!("a must be non-negative and finite, got {a}")));
    }
    Ok(())
}

/// Slowest frequency present in the braced integrand, `min(1, |1 − a|)`.
fn slowest_frequency(a: f64) -> Result<f64> {
    let gap = (1.0 - a).abs();
    if a > 0.0 && gap <= DEFAULT_EXCLUSION {
        return Err(Error::LightCone {
            distance: gap,
            half_width: DEFAULT_EXCLUSION,
        });
    }
    Ok(if a == 0.0 { 1.0 } else { gap.min(1.0) })
}

/// `e(x0, a)` by Abel-regularized quadrature of the direct integrand.
pub fn energy_quadrature(x0: f64, a: f64, settings: &QuadratureSettings) -> Result<EnergyShiftResult> {
    settings.plan_for(x0, a)?.energy(x0, a)
}

/// Static part of the energy, `a → ∞` limit of [`energy_quadrature`].
pub fn static_energy_quadrature(x0: f64, settings: &QuadratureSettings) -> Result<EnergyShiftResult> {
    check_point(x0, 0.0)?;
    settings.plan(x0, 1.0, 1.0)?.static_energy(x0)
}

fn operator_plan(x0: f64, a: f64, m_step: f64, settings: &QuadratureSettings) -> Result<QuadraturePlan> {
    check_point(x0, a)?;
    if !(m_step > 1e-4 && m_step < 1e-1) {
        return Err(domain(format!("m_step must lie in (1e-4, 1e-1), got {m_step}")));
    }
    let gap = (1.0 - a).abs() - m_step;
    if a > 0.0 && gap <= DEFAULT_EXCLUSION {
        return Err(Error::LightCone {
            distance: (1.0 - a).abs(),
            half_width: m_step + DEFAULT_EXCLUSION,
        });
    }
    let omega_min = if a == 0.0 { 1.0 - m_step } else { gap.min(1.0 - m_step) };
    settings.plan(x0, omega_min, 1.0 + m_step + a)
}

/// `D_m = 2 − 2∂/∂m + ∂²/∂m²` by central differences of step `h`.
fn apply_dm(lower: f64, mid: f64, upper: f64, h: f64) -> f64 {
    2.0 * mid - (upper - lower) / h + (upper - 2.0 * mid + lower) / (h * h)
}

/// `e(x0, a)` from the operator form `−1/(12π) D_m I(m)|_{m=1}`, with the
/// central-difference stencil Richardson-extrapolated over `m_step` and
/// `m_step/2`.
pub fn energy_quadrature_operator_form(
    x0: f64,
    a: f64,
    m_step: f64,
    settings: &QuadratureSettings,
) -> Result<EnergyShiftResult> {
    let plan = operator_plan(x0, a, m_step, settings)?;
    if a == 0.0 {
        return Ok(EnergyShiftResult {
            value: 0.0,
            residual: 0.0,
            method: EnergyMethod::OperatorForm,
        });
    }
    let h = m_step;
    let ms = [1.0 - h, 1.0 - 0.5 * h, 1.0, 1.0 + 0.5 * h, 1.0 + h];
    let (i, res) = plan.sine_moments(x0, a, &ms)?;
    let coarse = apply_dm(i[0], i[2], i[4], h);
    let fine = apply_dm(i[1], i[2], i[3], 0.5 * h);
    let value = PREFACTOR * (4.0 * fine - coarse) / 3.0;
    // moment errors are amplified by the second difference
    let residual = (PREFACTOR * 16.0 * res / (h * h)).abs();
    Ok(EnergyShiftResult {
        value,
        residual,
        method: EnergyMethod::OperatorForm,
    })
}

/// Operator form with the bare three-point stencil at `m ∈ {1 − h, 1, 1 + h}`.
pub fn operator_stencil(x0: f64, a: f64, m_step: f64, settings: &QuadratureSettings) -> Result<f64> {
    let plan = operator_plan(x0, a, m_step, settings)?;
    if a == 0.0 {
        return Ok(0.0);
    }
    let ms = [1.0 - m_step, 1.0, 1.0 + m_step];
    let (i, _) = plan.sine_moments(x0, a, &ms)?;
    Ok(PREFACTOR * apply_dm(i[0], i[1], i[2], m_step))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn zero_at_t_zero() {
        let s = QuadratureSettings::default();
        assert_eq!(energy_quadrature(2.0, 0.0, &s).unwrap().value, 0.0);
        assert_eq!(energy_quadrature_operator_form(2.0, 0.0, 0.01, &s).unwrap().value, 0.0);
    }

    #[test]
    fn brace_is_cancellation_free() {
        let u = 1e-9;
        let a = 0.5;
        assert!(rel(brace(a, u), 0.5 * a * a * u) < 1e-12);
        assert_eq!(brace(a, 0.0), 0.0);
        assert_eq!(brace(a, -u), -brace(a, u));
    }

    #[test]
    fn settings_validation() {
        let base = QuadratureSettings::default;
        let s = QuadratureSettings { epsilon_ladder: vec![0.1, 0.2], ..base() };
        assert!(s.validate().is_err());
        let s = QuadratureSettings { extrapolation_order: 6, ..base() };
        assert!(s.validate().is_err());
        let s = QuadratureSettings { x_max: Some(5.0), ..base() };
        assert!(energy_quadrature(2.0, 0.5, &s).is_err());
    }

    #[test]
    fn domain_and_light_cone() {
        let s = QuadratureSettings::default();
        assert!(energy_quadrature(0.0, 0.5, &s).is_err());
        assert!(energy_quadrature(1.0, -0.5, &s).is_err());
        assert!(matches!(energy_quadrature(1.0, 1.0, &s), Err(Error::LightCone { .. })));
        assert!(energy_quadrature_operator_form(1.0, 0.995, 0.01, &s).is_err());
        assert!(energy_quadrature_operator_form(1.0, 0.5, 0.5, &s).is_err());
    }

    #[test]
    fn plan_respects_truncation_rule() {
        let s = QuadratureSettings::default();
        let p = s.plan_for(2.0, 0.5).unwrap();
        let eps_min = 0.003125 * 0.5;
        assert!((p.x_max - 40.0 / eps_min).abs() < 1e-9);
        let p = s.plan_for(40.0, 0.5).unwrap();
        assert!((p.epsilons[0] - 0.1 * 2.0 / 40.0).abs() < 1e-15);
        let mut wide = s.clone();
        wide.epsilon_ladder = vec![10.0, 5.0];
        wide.extrapolation_order = 1;
        let p = wide.plan_for(100.0, 3.0).unwrap();
        assert_eq!(p.x_max, 5_000.0);
    }
}
