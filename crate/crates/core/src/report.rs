//! Validation report: closed forms against the quadrature and mode-sum
//! oracles, adjudication of the ambiguous printed terms, and attribution of
//! failures to individual terms.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::force::{ForceModel, Term, Transcription, AMBIGUITIES};
use crate::oracle::{
    energy_quadrature, energy_quadrature_operator_form, force_finite_difference_reduced,
    mode_sum_energy, static_force_finite_difference, ModeSumSettings, QuadratureSettings,
};
use crate::scenario::{Regime, Scenario, UnitSystem};

/// Points and tolerances of an oracle check.
#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub x0_values: Vec<f64>,
    pub a_values: Vec<f64>,
    pub static_x0_values: Vec<f64>,
    /// Cavity sizes `L/d` of the mode-sum study; empty skips it.
    pub mode_sum_ratios: Vec<f64>,
    /// `(x0, a)` of the mode-sum study.
    pub mode_sum_point: (f64, f64),
    pub h_rel: f64,
    pub m_step: f64,
    pub force_tolerance: f64,
    pub energy_tolerance: f64,
    pub static_tolerance: f64,
    pub mode_sum_tolerance: f64,
    pub quadrature: QuadratureSettings,
    pub model: ForceModel,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            x0_values: vec![1.0, 2.0, 5.0],
            a_values: vec![0.3, 0.7, 1.5, 3.0],
            static_x0_values: vec![1.0, 2.0, 5.0],
            mode_sum_ratios: vec![20.0, 40.0, 80.0],
            mode_sum_point: (2.0, 0.5),
            h_rel: 1e-3,
            m_step: 0.01,
            force_tolerance: 1e-4,
            energy_tolerance: 1e-5,
            static_tolerance: 1e-6,
            mode_sum_tolerance: 1e-2,
            quadrature: QuadratureSettings::default(),
            model: ForceModel::default(),
        }
    }
}

impl ReportOptions {
    /// Reject grids touching the light cone before any work is done.
    pub fn validate(&self) -> Result<()> {
        if self.x0_values.is_empty() || self.a_values.is_empty() {
            return Err(Error::Input("oracle grid must not be empty".into()));
        }
        for &x0 in self.x0_values.iter().chain(&self.static_x0_values) {
            if !(x0 > 0.0) || !x0.is_finite() {
                return Err(Error::Domain(format!("grid x0 must be positive, got {x0}")));
            }
        }
        let guard = self.model.exclusion.max(2.0 * self.h_rel) + self.m_step;
        for &a in &self.a_values {
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::Domain(format!("grid a must be non-negative, got {a}")));
            }
            if (a - 1.0).abs() <= guard {
                return Err(Error::LightCone {
                    distance: (a - 1.0).abs(),
                    half_width: guard,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ForceCheck {
    pub x0: f64,
    pub a: f64,
    pub regime: Regime,
    pub closed_form: f64,
    pub finite_difference: f64,
    pub relative_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StaticCheck {
    pub x0: f64,
    pub closed_form: f64,
    pub finite_difference: f64,
    pub relative_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyCheck {
    pub x0: f64,
    pub a: f64,
    pub direct: f64,
    pub direct_residual: f64,
    pub operator_form: f64,
    pub relative_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeSumRow {
    pub box_ratio: f64,
    pub max_index: usize,
    pub mode_sum: f64,
    pub quadrature: f64,
    pub relative_gap: f64,
    pub window_residual: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeSumStudy {
    pub x0: f64,
    pub a: f64,
    pub rows: Vec<ModeSumRow>,
    pub monotone: bool,
    pub final_gap_within_tolerance: bool,
}

/// Verdict on one ambiguous printed term.
#[derive(Debug, Clone, Serialize)]
pub struct Adjudication {
    pub ambiguity: &'static str,
    pub term: &'static str,
    pub printed: &'static str,
    pub alternative: &'static str,
    /// Largest relative deviation from the finite-difference oracle over the
    /// grid points where the term contributes.
    pub max_error_printed: f64,
    pub max_error_alternative: f64,
    /// `"printed"` or `"alternative"`.
    pub adopted: &'static str,
    pub points: usize,
}

/// How well one term explains the residual `closed form − oracle`.
#[derive(Debug, Clone, Serialize)]
pub struct TermScore {
    pub term: &'static str,
    /// Squared cosine between the residual and the term across the grid.
    pub alignment: f64,
    /// Least-squares multiple of the term matching the residual.
    pub excess_factor: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub generator: String,
    pub pass: bool,
    pub transcription: Transcription,
    pub tolerances: Tolerances,
    pub force_checks: Vec<ForceCheck>,
    pub static_checks: Vec<StaticCheck>,
    pub energy_checks: Vec<EnergyCheck>,
    pub mode_sum: Option<ModeSumStudy>,
    pub adjudications: Vec<Adjudication>,
    /// Terms ordered by how well they explain the residual; present only when
    /// a force check failed.
    pub suspect_terms: Vec<TermScore>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub force: f64,
    pub energy: f64,
    pub static_force: f64,
    pub mode_sum: f64,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Name of the term most aligned with the residual, if any check failed.
    pub fn offending_term(&self) -> Option<&'static str> {
        self.suspect_terms.first().map(|s| s.term)
    }

    /// True when the report is incomplete because an oracle failed.
    pub fn numerical_failure(&self) -> bool {
        !self.errors.is_empty()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

struct GridPoint {
    x0: f64,
    a: f64,
    oracle: std::result::Result<f64, Error>,
}

/// Run every check and assemble the report. Oracle failures are recorded in
/// `errors` (the report is then partial and fails); invalid grids are
/// rejected with an error.
pub fn build_report(opts: &ReportOptions) -> Result<ValidationReport> {
    opts.validate()?;
    let mut errors = Vec::new();

    let points: Vec<(f64, f64)> = opts
        .x0_values
        .iter()
        .flat_map(|&x0| opts.a_values.iter().map(move |&a| (x0, a)))
        .collect();

    let grid: Vec<GridPoint> = points
        .par_iter()
        .map(|&(x0, a)| GridPoint {
            x0,
            a,
            oracle: force_finite_difference_reduced(x0, a, opts.h_rel, &opts.quadrature).map(|f| f.value),
        })
        .collect();

    let model = &opts.model;
    let mut force_checks = Vec::new();
    let mut residuals = Vec::new();
    for p in &grid {
        let oracle = match &p.oracle {
            Ok(v) => *v,
            Err(e) => {
                errors.push(format!("finite-difference force at x0={}, a={}: {e}", p.x0, p.a));
                continue;
            }
        };
        let r = model.total_force(p.x0, p.a)?;
        let closed = r.phi_total.expect("grid avoids the light cone");
        let err = rel(closed, oracle);
        residuals.push((p.x0, p.a, closed - oracle));
        force_checks.push(ForceCheck {
            x0: p.x0,
            a: p.a,
            regime: r.regime,
            closed_form: closed,
            finite_difference: oracle,
            relative_error: err,
            pass: err <= opts.force_tolerance,
        });
    }

    let static_checks: Vec<StaticCheck> = opts
        .static_x0_values
        .par_iter()
        .map(|&x0| (x0, static_force_finite_difference(x0, opts.h_rel, &opts.quadrature)))
        .collect::<Vec<_>>()
        .into_iter()
        .filter_map(|(x0, fd)| match fd {
            Ok(fd) => {
                let closed = model.static_force(x0).ok()?;
                let err = rel(closed, fd);
                Some(StaticCheck {
                    x0,
                    closed_form: closed,
                    finite_difference: fd,
                    relative_error: err,
                    pass: err <= opts.static_tolerance,
                })
            }
            Err(e) => {
                errors.push(format!("static energy derivative at x0={x0}: {e}"));
                None
            }
        })
        .collect();

    let energy_results: Vec<_> = points
        .par_iter()
        .map(|&(x0, a)| {
            let d = energy_quadrature(x0, a, &opts.quadrature);
            let o = energy_quadrature_operator_form(x0, a, opts.m_step, &opts.quadrature);
            (x0, a, d, o)
        })
        .collect();
    let mut energy_checks = Vec::new();
    for (x0, a, d, o) in energy_results {
        match (d, o) {
            (Ok(d), Ok(o)) => {
                let err = rel(o.value, d.value);
                energy_checks.push(EnergyCheck {
                    x0,
                    a,
                    direct: d.value,
                    direct_residual: d.residual,
                    operator_form: o.value,
                    relative_error: err,
                    pass: err <= opts.energy_tolerance,
                });
            }
            (Err(e), _) | (_, Err(e)) => errors.push(format!("energy at x0={x0}, a={a}: {e}")),
        }
    }

    let mode_sum = if opts.mode_sum_ratios.is_empty() {
        None
    } else {
        match mode_sum_study(opts) {
            Ok(s) => Some(s),
            Err(e) => {
                errors.push(format!("mode sum: {e}"));
                None
            }
        }
    };

    let adjudications = adjudicate(model, &grid)?;

    let forces_pass = force_checks.iter().all(|c| c.pass);
    let suspect_terms = if forces_pass { Vec::new() } else { attribute(model, &residuals)? };

    let pass = errors.is_empty()
        && forces_pass
        && static_checks.iter().all(|c| c.pass)
        && energy_checks.iter().all(|c| c.pass)
        && mode_sum
            .as_ref()
            .map_or(true, |m| m.monotone && m.final_gap_within_tolerance);

    Ok(ValidationReport {
        generator: format!("casimir-core {}", env!("CARGO_PKG_VERSION")),
        pass,
        transcription: model.transcription,
        tolerances: Tolerances {
            force: opts.force_tolerance,
            energy: opts.energy_tolerance,
            static_force: opts.static_tolerance,
            mode_sum: opts.mode_sum_tolerance,
        },
        force_checks,
        static_checks,
        energy_checks,
        mode_sum,
        adjudications,
        suspect_terms,
        errors,
    })
}

fn mode_sum_study(opts: &ReportOptions) -> Result<ModeSumStudy> {
    let (x0, a) = opts.mode_sum_point;
    // unit distance and c = 1, so that x0 = 2k0 and a = t/2
    let s = Scenario::new(1.0, 0.5 * x0, 1.0, UnitSystem::Natural)?;
    let t = s.time_at(a);
    let reference = energy_quadrature(x0, a, &opts.quadrature)?.value;
    let mut rows = Vec::new();
    for &ratio in &opts.mode_sum_ratios {
        let settings = ModeSumSettings::for_scenario(&s, ratio, t)?;
        let r = mode_sum_energy(&s, &settings)?;
        rows.push(ModeSumRow {
            box_ratio: ratio,
            max_index: r.max_index,
            mode_sum: r.value,
            quadrature: reference,
            relative_gap: rel(r.value, reference),
            window_residual: r.residual,
            warnings: r.warnings,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].relative_gap < w[0].relative_gap);
    let final_ok = rows.last().is_some_and(|r| r.relative_gap < opts.mode_sum_tolerance);
    Ok(ModeSumStudy {
        x0,
        a,
        rows,
        monotone,
        final_gap_within_tolerance: final_ok,
    })
}

fn adjudicate(model: &ForceModel, grid: &[GridPoint]) -> Result<Vec<Adjudication>> {
    let mut out = Vec::new();
    for amb in &AMBIGUITIES {
        let variant = |printed: bool| {
            let mut m = model.clone();
            m.transcription = (amb.apply)(model.transcription, printed);
            m
        };
        let (printed, alternative) = (variant(true), variant(false));
        let mut worst = (0.0_f64, 0.0_f64);
        let mut n = 0;
        for p in grid {
            let Ok(oracle) = p.oracle else { continue };
            let terms = printed.dynamic_terms(p.x0, p.a)?;
            if terms.get(amb.term).is_none() {
                continue;
            }
            n += 1;
            let ep = rel(printed.total_force(p.x0, p.a)?.phi_total.unwrap(), oracle);
            let ea = rel(alternative.total_force(p.x0, p.a)?.phi_total.unwrap(), oracle);
            worst = (worst.0.max(ep), worst.1.max(ea));
        }
        out.push(Adjudication {
            ambiguity: amb.name,
            term: amb.term.name(),
            printed: amb.printed,
            alternative: amb.alternative,
            max_error_printed: worst.0,
            max_error_alternative: worst.1,
            adopted: if worst.0 <= worst.1 { "printed" } else { "alternative" },
            points: n,
        });
    }
    Ok(out)
}

/// Rank terms by the squared cosine between their values and the residual
/// vector over the grid.
fn attribute(model: &ForceModel, residuals: &[(f64, f64, f64)]) -> Result<Vec<TermScore>> {
    let mut columns = vec![vec![0.0; residuals.len()]; Term::ALL.len()];
    for (i, &(x0, a, _)) in residuals.iter().enumerate() {
        let st = model.static_terms(x0)?;
        let dy = model.dynamic_terms(x0, a)?;
        for (term, v) in st.terms.iter().chain(&dy.terms) {
            let k = Term::ALL.iter().position(|t| t == term).unwrap();
            columns[k][i] = *v;
        }
    }
    let r: Vec<f64> = residuals.iter().map(|t| t.2).collect();
    let rr: f64 = r.iter().map(|v| v * v).sum();
    let mut scores: Vec<TermScore> = Term::ALL
        .iter()
        .zip(&columns)
        .filter_map(|(term, col)| {
            let vv: f64 = col.iter().map(|v| v * v).sum();
            if vv == 0.0 || rr == 0.0 {
                return None;
            }
            let rv: f64 = col.iter().zip(&r).map(|(a, b)| a * b).sum();
            Some(TermScore {
                term: term.name(),
                alignment: rv * rv / (rr * vv),
                excess_factor: rv / vv,
            })
        })
        .collect();
    scores.sort_by(|a, b| b.alignment.total_cmp(&a.alignment));
    Ok(scores)
}
