//! Closed-form static and dynamical Casimir–Polder forces.
//!
//! Everything is dimensionless: `Φ = F d⁴ / μ²` as a function of `x0 = 2k0d`
//! and `a = ct/2d`. Each printed term of the closed forms is evaluated as a
//! separately named [`Term`] so that it can be checked, replaced by an
//! alternative [`Transcription`] reading, or perturbed for fault injection.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::oracle::{energy_quadrature, EnergyShiftResult, QuadratureSettings};
use crate::roots;
use crate::scenario::{force_scale, reduce_with_exclusion, Regime, Scenario, DEFAULT_EXCLUSION};
use crate::specfun::{aux_fg, cos_integral, sin_integral};

/// Named sub-expressions of the static and dynamical forces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    /// `8k0d` contribution of the static force.
    StaticLinear,
    /// Static term carrying `f(2k0d) − π cos(2k0d)`.
    StaticF,
    /// Static term carrying `g(2k0d) − π sin(2k0d)`.
    StaticG,
    /// Before the round trip: rational term multiplying `sin(ck0t)`.
    BeforeRationalSin,
    /// Before the round trip: rational term multiplying `cos(ck0t)`.
    BeforeRationalCos,
    /// Before the round trip: `[Ci(2dk0 − ck0t) + Ci(2dk0 + ck0t)]` bracket.
    BeforeCiPair,
    /// Before the round trip: `[π + Si(ck0t + 2dk0) + Si(2dk0 − ck0t)]` bracket.
    BeforeSiPair,
    /// After the round trip: first rational term (mixed sin/cos over `4d² − c²t²`).
    AfterRationalFirst,
    /// After the round trip: `cos(ck0t)` term over `(4d² − c²t²)²`.
    AfterRationalSecond,
    /// After the round trip: `sin(ck0t)` term over `(4d² − c²t²)³`.
    AfterRationalThird,
    /// After the round trip: `[Ci(ck0t + 2dk0) + Ci(ck0t − 2dk0)]` bracket.
    AfterCiPair,
    /// After the round trip: `[Si(ck0t + 2dk0) − Si(ck0t − 2dk0)]` bracket.
    AfterSiPair,
}

impl Term {
    pub const ALL: [Term; 12] = [
        Term::StaticLinear,
        Term::StaticF,
        Term::StaticG,
        Term::BeforeRationalSin,
        Term::BeforeRationalCos,
        Term::BeforeCiPair,
        Term::BeforeSiPair,
        Term::AfterRationalFirst,
        Term::AfterRationalSecond,
        Term::AfterRationalThird,
        Term::AfterCiPair,
        Term::AfterSiPair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Term::StaticLinear => "static-linear",
            Term::StaticF => "static-f",
            Term::StaticG => "static-g",
            Term::BeforeRationalSin => "before-rational-sin",
            Term::BeforeRationalCos => "before-rational-cos",
            Term::BeforeCiPair => "before-ci-pair",
            Term::BeforeSiPair => "before-si-pair",
            Term::AfterRationalFirst => "after-rational-first",
            Term::AfterRationalSecond => "after-rational-second",
            Term::AfterRationalThird => "after-rational-third",
            Term::AfterCiPair => "after-ci-pair",
            Term::AfterSiPair => "after-si-pair",
        }
    }

    fn index(self) -> usize {
        Term::ALL.iter().position(|&t| t == self).unwrap()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Term {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Term::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown force term {s:?}")))
    }
}

/// Denominator of the first before-round-trip term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FirstDenominator {
    /// `(4d² − c²t²)³`
    Difference,
    /// `(4d² + c²t²)³`
    Sum,
}

/// Prefactor of the after-round-trip Si/Ci brackets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BracketPrefactor {
    /// `1/(12π d⁴)`
    TwelfthPi,
    /// `1/(2π d⁴)`
    HalfPi,
}

/// Which reading of each ambiguous printed term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transcription {
    pub before_first_denominator: FirstDenominator,
    pub after_bracket_prefactor: BracketPrefactor,
    /// Multiplier on the after-round-trip `sin(ck0t)/(4d² − c²t²)³` term.
    pub after_third_multiplier: f64,
    /// Whether the constant `π` sits inside the before-round-trip Si bracket.
    pub before_si_bracket_pi: bool,
}

impl Transcription {
    /// The reading that reproduces the regularized quadrature of the energy.
    pub const fn adopted() -> Self {
        Transcription {
            before_first_denominator: FirstDenominator::Difference,
            after_bracket_prefactor: BracketPrefactor::TwelfthPi,
            after_third_multiplier: 2.0,
            before_si_bracket_pi: true,
        }
    }

    /// Symbol-for-symbol reading of the published expressions.
    pub const fn printed() -> Self {
        Transcription {
            before_first_denominator: FirstDenominator::Sum,
            after_bracket_prefactor: BracketPrefactor::HalfPi,
            after_third_multiplier: 1.0,
            before_si_bracket_pi: true,
        }
    }
}

impl Default for Transcription {
    fn default() -> Self {
        Transcription::adopted()
    }
}

/// One ambiguous printed symbol and its two candidate readings.
#[derive(Debug, Clone, Copy)]
pub struct Ambiguity {
    pub name: &'static str,
    pub term: Term,
    pub printed: &'static str,
    pub alternative: &'static str,
    /// Transcription with only this ambiguity switched to the printed
    /// reading (when `printed_reading` is true) or to the alternative.
    pub apply: fn(Transcription, bool) -> Transcription,
}

pub const AMBIGUITIES: [Ambiguity; 4] = [
    Ambiguity {
        name: "before-first-denominator",
        term: Term::BeforeRationalSin,
        printed: "(4d^2 + c^2 t^2)^3",
        alternative: "(4d^2 - c^2 t^2)^3",
        apply: |t, printed| Transcription {
            before_first_denominator: if printed {
                FirstDenominator::Sum
            } else {
                FirstDenominator::Difference
            },
            ..t
        },
    },
    Ambiguity {
        name: "after-bracket-prefactor",
        term: Term::AfterCiPair,
        printed: "1/(2 pi d^4)",
        alternative: "1/(12 pi d^4)",
        apply: |t, printed| Transcription {
            after_bracket_prefactor: if printed {
                BracketPrefactor::HalfPi
            } else {
                BracketPrefactor::TwelfthPi
            },
            ..t
        },
    },
    Ambiguity {
        name: "after-third-term",
        term: Term::AfterRationalThird,
        printed: "ct(64d^4 - 12c^2d^2t^2 + c^4t^4) sin(ck0t) / (3 pi d^3 (4d^2 - c^2t^2)^3)",
        alternative: "twice the printed expression",
        apply: |t, printed| Transcription {
            after_third_multiplier: if printed { 1.0 } else { 2.0 },
            ..t
        },
    },
    Ambiguity {
        name: "before-si-bracket-pi",
        term: Term::BeforeSiPair,
        printed: "[pi + Si(ck0t + 2dk0) + Si(2dk0 - ck0t)]",
        alternative: "[Si(ck0t + 2dk0) + Si(2dk0 - ck0t)]",
        apply: |t, printed| Transcription {
            before_si_bracket_pi: printed,
            ..t
        },
    },
];

/// Values of the named terms at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct TermBreakdown {
    pub regime: Regime,
    pub terms: Vec<(Term, f64)>,
}

impl TermBreakdown {
    pub fn sum(&self) -> f64 {
        self.terms.iter().map(|(_, v)| v).sum()
    }

    pub fn get(&self, term: Term) -> Option<f64> {
        self.terms.iter().find(|(t, _)| *t == term).map(|(_, v)| *v)
    }
}

/// Dimensionless force at one `(x0, a)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceResult {
    pub phi_static: f64,
    /// `None` inside the light-cone exclusion window.
    pub phi_dyn: Option<f64>,
    pub phi_total: Option<f64>,
    pub regime: Regime,
    /// Total force in the scenario's unit system, when a scenario was given.
    pub physical_value: Option<f64>,
}

/// Closed-form evaluator: a transcription, optional per-term scale factors
/// (fault injection) and the light-cone exclusion half-width.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceModel {
    pub transcription: Transcription,
    pub exclusion: f64,
    term_scale: [f64; 12],
}

impl Default for ForceModel {
    fn default() -> Self {
        ForceModel {
            transcription: Transcription::adopted(),
            exclusion: DEFAULT_EXCLUSION,
            term_scale: [1.0; 12],
        }
    }
}

impl ForceModel {
    pub fn with_transcription(transcription: Transcription) -> Self {
        ForceModel {
            transcription,
            ..Default::default()
        }
    }

    pub fn with_exclusion(mut self, half_width: f64) -> Self {
        self.exclusion = half_width;
        self
    }

    /// Multiply one term by `factor`. Used to corrupt a term deliberately.
    pub fn with_term_scale(mut self, term: Term, factor: f64) -> Self {
        self.term_scale[term.index()] = factor;
        self
    }

    pub fn is_pristine(&self) -> bool {
        self.term_scale.iter().all(|&s| s == 1.0)
    }

    fn scaled(&self, term: Term, value: f64) -> (Term, f64) {
        (term, value * self.term_scale[term.index()])
    }

    pub fn static_terms(&self, x0: f64) -> Result<TermBreakdown> {
        check_x0(x0)?;
        let aux = aux_fg(x0)?;
        let (s, c) = x0.sin_cos();
        let h = 0.5 * x0 * x0;
        let pre = 1.0 / (12.0 * PI);
        Ok(TermBreakdown {
            regime: Regime::AfterRoundTrip,
            terms: vec![
                self.scaled(Term::StaticLinear, pre * 4.0 * x0),
                self.scaled(Term::StaticF, -pre * 6.0 * (h - 1.0) * (aux.f_val - PI * c)),
                self.scaled(Term::StaticG, -pre * 2.0 * x0 * (h - 3.0) * (aux.g_val - PI * s)),
            ],
        })
    }

    pub fn static_force(&self, x0: f64) -> Result<f64> {
        Ok(self.static_terms(x0)?.sum())
    }

    /// Terms of the dynamical force. Errors inside the light-cone window.
    pub fn dynamic_terms(&self, x0: f64, a: f64) -> Result<TermBreakdown> {
        check_x0(x0)?;
        if !(a >= 0.0) || !a.is_finite() {
            return Err(domain(format!("a must be non-negative and finite, got {a}")));
        }
        let regime = Regime::classify(a, self.exclusion);
        let (sx, cx) = x0.sin_cos();
        let h = 0.5 * x0 * x0;
        // coefficient of the Ci pair and of the Si pair, common to both regimes
        let ci_coef = x0 * (3.0 - h) * cx + 3.0 * (h - 1.0) * sx;
        let si_coef = 3.0 * (1.0 - h) * cx + x0 * (3.0 - h) * sx;
        let (st, ct) = (a * x0).sin_cos();
        // 1 − a² without cancellation near the light cone
        let one_minus_a2 = (1.0 - a) * (1.0 + a);
        let tr = &self.transcription;
        let terms = match regime {
            Regime::LightCone => {
                return Err(Error::LightCone {
                    distance: (a - 1.0).abs(),
                    half_width: self.exclusion,
                })
            }
            Regime::BeforeRoundTrip => {
                let poly = 9.0 - h + 4.0 * a * a * (0.25 * x0 * x0 - 2.0) + a.powi(4) * (3.0 - h);
                let den = match tr.before_first_denominator {
                    FirstDenominator::Difference => one_minus_a2.powi(3),
                    FirstDenominator::Sum => (1.0 + a * a).powi(3),
                };
                let rational_sin = a * poly * st / (6.0 * PI * den);
                let rational_cos = x0 * (a * a - 2.0) * ct / (6.0 * PI * one_minus_a2 * one_minus_a2);
                let lo = x0 * (1.0 - a);
                let hi = x0 * (1.0 + a);
                // Brackets are summed before the trig coefficients multiply
                // them; at small a they cancel the static force.
                let ci_pair = if a == 0.0 {
                    2.0 * cos_integral(x0)?
                } else {
                    cos_integral(lo)? + cos_integral(hi)?
                };
                let si_sum = if a == 0.0 {
                    2.0 * sin_integral(x0)?
                } else {
                    sin_integral(hi)? + sin_integral(lo)?
                };
                let si_pair = if tr.before_si_bracket_pi { PI + si_sum } else { si_sum };
                let pre = 1.0 / (12.0 * PI);
                vec![
                    self.scaled(Term::BeforeRationalSin, rational_sin),
                    self.scaled(Term::BeforeRationalCos, rational_cos),
                    self.scaled(Term::BeforeCiPair, pre * ci_pair * ci_coef),
                    self.scaled(Term::BeforeSiPair, pre * si_pair * si_coef),
                ]
            }
            Regime::AfterRoundTrip => {
                let first = (-2.0 * x0 * ct + 2.0 * a * (1.0 - h) * st) / (12.0 * PI * one_minus_a2);
                let second = -x0 * ct / (6.0 * PI * one_minus_a2 * one_minus_a2);
                let third = tr.after_third_multiplier * a * (4.0 - 3.0 * a * a + a.powi(4)) * st
                    / (6.0 * PI * one_minus_a2.powi(3));
                let lo = x0 * (a - 1.0);
                let hi = x0 * (a + 1.0);
                let pre = match tr.after_bracket_prefactor {
                    BracketPrefactor::TwelfthPi => 1.0 / (12.0 * PI),
                    BracketPrefactor::HalfPi => 1.0 / (2.0 * PI),
                };
                let ci_pair = cos_integral(hi)? + cos_integral(lo)?;
                let si_pair = sin_integral(hi)? - sin_integral(lo)?;
                vec![
                    self.scaled(Term::AfterRationalFirst, first),
                    self.scaled(Term::AfterRationalSecond, second),
                    self.scaled(Term::AfterRationalThird, third),
                    self.scaled(Term::AfterCiPair, pre * ci_pair * ci_coef),
                    self.scaled(Term::AfterSiPair, pre * si_pair * si_coef),
                ]
            }
        };
        Ok(TermBreakdown { regime, terms })
    }

    pub fn dynamical_force(&self, x0: f64, a: f64) -> Result<f64> {
        Ok(self.dynamic_terms(x0, a)?.sum())
    }

    /// Static plus dynamical force; errors inside the light-cone window.
    pub fn total_force(&self, x0: f64, a: f64) -> Result<ForceResult> {
        let r = self.evaluate(x0, a)?;
        match r.regime {
            Regime::LightCone => Err(Error::LightCone {
                distance: (a - 1.0).abs(),
                half_width: self.exclusion,
            }),
            _ => Ok(r),
        }
    }

    /// Like [`ForceModel::total_force`] but flags light-cone points instead
    /// of failing on them.
    pub fn evaluate(&self, x0: f64, a: f64) -> Result<ForceResult> {
        let phi_static = self.static_force(x0)?;
        let phi_dyn = match self.dynamical_force(x0, a) {
            Ok(v) => Some(v),
            Err(Error::LightCone { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(ForceResult {
            phi_static,
            phi_dyn,
            phi_total: phi_dyn.map(|d| phi_static + d),
            regime: Regime::classify(a, self.exclusion),
            physical_value: None,
        })
    }

    /// Evaluate a scenario at time `t`, attaching the physical force.
    pub fn evaluate_scenario(&self, s: &Scenario, t: f64) -> Result<ForceResult> {
        let p = reduce_with_exclusion(s, t, self.exclusion)?;
        let mut r = self.evaluate(p.x0, p.a)?;
        r.physical_value = r.phi_total.map(|v| v * force_scale(s).native());
        Ok(r)
    }
}

fn check_x0(x0: f64) -> Result<()> {
    if x0 > 0.0 && x0.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("x0 must be positive and finite, got {x0}")))
    }
}

/// `Φ_stat(x0)` with the adopted transcription.
pub fn static_force(x0: f64) -> Result<f64> {
    ForceModel::default().static_force(x0)
}

/// `Φ_dyn(x0, a)` with the adopted transcription and default exclusion.
pub fn dynamical_force(x0: f64, a: f64) -> Result<f64> {
    ForceModel::default().dynamical_force(x0, a)
}

pub fn total_force(x0: f64, a: f64) -> Result<ForceResult> {
    ForceModel::default().total_force(x0, a)
}

/// Dimensionless energy shift `ΔE d³/μ²` by regularized quadrature.
pub fn energy_shift(x0: f64, a: f64, settings: &QuadratureSettings) -> Result<EnergyShiftResult> {
    energy_quadrature(x0, a, settings)
}

/// Grid spacing used to bracket sign changes of `Φ_stat`; zeros are about `π`
/// apart.
const ZERO_SCAN_STEP: f64 = 0.02;

/// Zeros of `Φ_stat` in `[x0_min, x0_max]`, refined by bisection to 1e-10.
pub fn static_force_zeros(x0_min: f64, x0_max: f64) -> Result<Vec<f64>> {
    if !(x0_min > 0.0 && x0_max > x0_min) {
        return Err(domain(format!(
            "need 0 < x0_min < x0_max, got [{x0_min}, {x0_max}]"
        )));
    }
    let model = ForceModel::default();
    let f = |x: f64| model.static_force(x).unwrap_or(f64::NAN);
    Ok(roots::sign_changes(f, x0_min, x0_max, ZERO_SCAN_STEP)
        .into_iter()
        .map(|(lo, hi)| roots::bisect(f, lo, hi, 1e-10))
        .collect())
}

/// Location of the first positive local maximum of the physical static force
/// as a function of distance at fixed `k0`. Since `F = Φ_stat(x0) μ²(2k0)⁴/x0⁴`,
/// this maximizes `Φ_stat(x0)/x0⁴`.
pub fn static_force_first_maximum(x0_min: f64, x0_max: f64) -> Result<Option<f64>> {
    if !(x0_min > 0.0 && x0_max > x0_min) {
        return Err(domain(format!(
            "need 0 < x0_min < x0_max, got [{x0_min}, {x0_max}]"
        )));
    }
    let model = ForceModel::default();
    let weighted = |x: f64| model.static_force(x).map(|v| v / x.powi(4)).unwrap_or(f64::NAN);
    Ok(roots::local_maxima(weighted, x0_min, x0_max, ZERO_SCAN_STEP, 1e-10)
        .into_iter()
        .find(|&x| weighted(x) > 0.0))
}
