//! Force as the negative distance derivative of the quadrature energy.
//!
//! Displacing the atom to `λd` maps `(x0, a) → (λx0, a/λ)` and scales the
//! energy unit `μ²/d³` by `λ⁻³`, so in units of `μ²/d⁴`
//!
//! ```text
//! Φ = −d/dλ [ e(λx0, a/λ) / λ³ ] at λ = 1.
//! ```

use crate::error::{domain, Error, Result};
use crate::oracle::abel::{QuadraturePlan, QuadratureSettings};
use crate::scenario::{reduce_with_exclusion, Scenario, DEFAULT_EXCLUSION};

/// Finite-difference force with its step-dependence diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDifferenceForce {
    pub value: f64,
    /// Change made by the Richardson step; a proxy for the truncation error.
    pub richardson_change: f64,
    /// Propagated quadrature residual.
    pub quadrature_residual: f64,
}

fn displaced(plan: &QuadraturePlan, x0: f64, a: f64, lambda: f64) -> Result<(f64, f64)> {
    let r = plan.energy(x0 * lambda, a / lambda)?;
    let l3 = lambda.powi(3);
    Ok((r.value / l3, r.residual / l3))
}

/// Φ at `(x0, a)` from central differences of step `h_rel` and `h_rel/2`,
/// combined by one Richardson step. All four displaced energies share one
/// quadrature plan.
pub fn force_finite_difference_reduced(
    x0: f64,
    a: f64,
    h_rel: f64,
    settings: &QuadratureSettings,
) -> Result<FiniteDifferenceForce> {
    if !(1e-6..=1e-2).contains(&h_rel) {
        return Err(domain(format!("h_rel must lie in [1e-6, 1e-2], got {h_rel}")));
    }
    if !(x0 > 0.0) || !(a >= 0.0) || !x0.is_finite() || !a.is_finite() {
        return Err(domain(format!("invalid point x0 = {x0}, a = {a}")));
    }
    if a == 0.0 {
        return Ok(FiniteDifferenceForce {
            value: 0.0,
            richardson_change: 0.0,
            quadrature_residual: 0.0,
        });
    }
    let a_lo = a / (1.0 + h_rel);
    let a_hi = a / (1.0 - h_rel);
    for &ad in &[a_lo, a_hi] {
        if (ad - 1.0).abs() <= DEFAULT_EXCLUSION {
            return Err(Error::LightCone {
                distance: (ad - 1.0).abs(),
                half_width: DEFAULT_EXCLUSION,
            });
        }
    }
    if a_lo < 1.0 && a_hi > 1.0 {
        return Err(Error::LightCone {
            distance: (a - 1.0).abs(),
            half_width: a * h_rel,
        });
    }
    // slowest frequency over all displaced points
    let omega_min = (1.0 - a_lo).abs().min((1.0 - a_hi).abs()).min(1.0);
    let plan = settings.plan(x0 * (1.0 + h_rel), omega_min, 1.0 + a_hi)?;
    let mut residual = 0.0;
    let mut diff = |h: f64| -> Result<f64> {
        let (ep, rp) = displaced(&plan, x0, a, 1.0 + h)?;
        let (em, rm) = displaced(&plan, x0, a, 1.0 - h)?;
        residual += (rp + rm) / (2.0 * h);
        Ok(-(ep - em) / (2.0 * h))
    };
    let coarse = diff(h_rel)?;
    let fine = diff(0.5 * h_rel)?;
    let value = (4.0 * fine - coarse) / 3.0;
    Ok(FiniteDifferenceForce {
        value,
        richardson_change: (value - fine).abs(),
        quadrature_residual: residual,
    })
}

/// [`force_finite_difference_reduced`] for a physical scenario at time `t`,
/// returning the dimensionless Φ.
pub fn force_finite_difference(
    s: &Scenario,
    t: f64,
    h_rel: f64,
    settings: &QuadratureSettings,
) -> Result<FiniteDifferenceForce> {
    let p = reduce_with_exclusion(s, t, DEFAULT_EXCLUSION)?;
    force_finite_difference_reduced(p.x0, p.a, h_rel, settings)
}

/// Static force from the distance derivative of the static energy, where
/// only `x0` moves.
pub fn static_force_finite_difference(x0: f64, h_rel: f64, settings: &QuadratureSettings) -> Result<f64> {
    if !(1e-6..=1e-2).contains(&h_rel) {
        return Err(domain(format!("h_rel must lie in [1e-6, 1e-2], got {h_rel}")));
    }
    let plan = settings.plan(x0 * (1.0 + h_rel), 1.0, 1.0)?;
    let e = |l: f64| -> Result<f64> { Ok(plan.static_energy(x0 * l)?.value / l.powi(3)) };
    let diff = |h: f64| -> Result<f64> { Ok(-(e(1.0 + h)? - e(1.0 - h)?) / (2.0 * h)) };
    let coarse = diff(h_rel)?;
    let fine = diff(0.5 * h_rel)?;
    Ok((4.0 * fine - coarse) / 3.0)
}
