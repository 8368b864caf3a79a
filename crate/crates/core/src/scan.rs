//! Time and distance scans of the force, rendered as deterministic CSV.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::force::{static_force_zeros, ForceModel, ForceResult};
use crate::scenario::{force_scale, reduce_with_exclusion, Regime, Scenario, ScenarioDocument, UnitSystem, DEFAULT_EXCLUSION};

/// Time below which the perturbative treatment is trusted (seconds).
pub const VALIDITY_TIME_LIMIT: f64 = 1e-8;

/// Time window around the round trip within which the closed form is not
/// trusted in physical units (seconds).
pub const LIGHT_CONE_TIME_WINDOW: f64 = 7e-17;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanVariable {
    Time,
    Distance,
}

/// Whether scan bounds are physical (time, length) or reduced (`a`, `x0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundUnits {
    Physical,
    Reduced,
}

/// Light-cone exclusion half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exclusion {
    /// `1e-6` in `a`; in SI and Gaussian units widened to cover 7e-17 s.
    Default,
    /// Half-width in `a`.
    Reduced(f64),
    /// Half-width in the scenario's time unit.
    Time(f64),
}

impl Exclusion {
    /// Half-width in `a` for a scenario.
    pub fn half_width(&self, s: &Scenario) -> f64 {
        match *self {
            Exclusion::Default => match s.unit_system {
                UnitSystem::Natural => DEFAULT_EXCLUSION,
                _ => DEFAULT_EXCLUSION.max(s.exclusion_from_time(LIGHT_CONE_TIME_WINDOW)),
            },
            Exclusion::Reduced(w) => w,
            Exclusion::Time(w) => s.exclusion_from_time(w),
        }
    }

    fn describe(&self) -> String {
        match self {
            Exclusion::Default => "default".to_string(),
            Exclusion::Reduced(w) => format!("{w:e} (reduced)"),
            Exclusion::Time(w) => format!("{w:e} (time)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub variable: ScanVariable,
    pub min: f64,
    pub max: f64,
    pub samples: usize,
    pub units: BoundUnits,
    pub exclusion: Exclusion,
}

impl ScanSpec {
    pub fn new(variable: ScanVariable, min: f64, max: f64, samples: usize) -> Self {
        ScanSpec {
            variable,
            min,
            max,
            samples,
            units: BoundUnits::Physical,
            exclusion: Exclusion::Default,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min < self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Input(format!(
                "scan bounds need min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.samples < 2 {
            return Err(Error::Input("a scan needs at least 2 samples".into()));
        }
        let width = match self.exclusion {
            Exclusion::Default => 1.0,
            Exclusion::Reduced(w) | Exclusion::Time(w) => w,
        };
        if !(width > 0.0) {
            return Err(Error::Input("exclusion window must be positive".into()));
        }
        let lower_ok = match self.variable {
            ScanVariable::Time => self.min >= 0.0,
            ScanVariable::Distance => self.min > 0.0,
        };
        if !lower_ok {
            return Err(Error::Input(format!("scan lower bound {} out of range", self.min)));
        }
        Ok(())
    }

    /// Sample points, endpoints included.
    pub fn points(&self) -> Vec<f64> {
        let n = self.samples - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / n as f64
                }
            })
            .collect()
    }

    fn describe(&self) -> String {
        format!(
            "{} min={:e} max={:e} samples={} units={} exclusion={}",
            match self.variable {
                ScanVariable::Time => "time",
                ScanVariable::Distance => "distance",
            },
            self.min,
            self.max,
            self.samples,
            match self.units {
                BoundUnits::Physical => "physical",
                BoundUnits::Reduced => "reduced",
            },
            self.exclusion.describe()
        )
    }
}

/// One evaluated row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    /// Time (time scans) or distance (distance scans) in scenario units.
    pub coordinate: f64,
    pub x0: f64,
    pub a: f64,
    pub force: ForceResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub scenario: Scenario,
    pub spec: ScanSpec,
    /// Fixed time of a distance scan.
    pub t_fixed: Option<f64>,
    pub rows: Vec<ScanRow>,
    pub warnings: Vec<String>,
    /// Zeros of the static force inside a distance scan, as `(x0, d)`.
    pub static_zeros: Vec<(f64, f64)>,
}

fn validity_warning(s: &Scenario, t_max: f64) -> Option<String> {
    match s.unit_system {
        UnitSystem::Natural => None,
        _ if t_max > VALIDITY_TIME_LIMIT => Some(format!(
            "times up to {t_max:e} s exceed {VALIDITY_TIME_LIMIT:e} s; the perturbative result assumes times shorter than the decay time"
        )),
        _ => None,
    }
}

fn evaluate(model: &ForceModel, s: &Scenario, t: f64) -> Result<(f64, f64, ForceResult)> {
    let p = reduce_with_exclusion(s, t, model.exclusion)?;
    let mut r = model.evaluate(p.x0, p.a)?;
    r.physical_value = r.phi_total.map(|v| v * force_scale(s).native());
    Ok((p.x0, p.a, r))
}

/// Force versus time at the scenario's distance. Light-cone points are
/// flagged, never fatal.
pub fn run_time_scan(s: &Scenario, spec: &ScanSpec, model: &ForceModel) -> Result<ScanResult> {
    spec.validate()?;
    s.validate()?;
    if spec.variable != ScanVariable::Time {
        return Err(Error::Input("time scan needs a time variable".into()));
    }
    let model = model.clone().with_exclusion(spec.exclusion.half_width(s));
    let times: Vec<f64> = spec
        .points()
        .into_iter()
        .map(|v| match spec.units {
            BoundUnits::Physical => v,
            BoundUnits::Reduced => s.time_at(v),
        })
        .collect();
    let rows = times
        .par_iter()
        .map(|&t| {
            let (x0, a, force) = evaluate(&model, s, t)?;
            Ok(ScanRow {
                coordinate: t,
                x0,
                a,
                force,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let warnings = validity_warning(s, *times.last().unwrap()).into_iter().collect();
    Ok(ScanResult {
        scenario: *s,
        spec: spec.clone(),
        t_fixed: None,
        rows,
        warnings,
        static_zeros: Vec::new(),
    })
}

/// Force versus distance at fixed time, plus the static-force zeros in range.
pub fn run_distance_scan(template: &Scenario, spec: &ScanSpec, t_fixed: f64, model: &ForceModel) -> Result<ScanResult> {
    spec.validate()?;
    template.validate()?;
    if spec.variable != ScanVariable::Distance {
        return Err(Error::Input("distance scan needs a distance variable".into()));
    }
    if !(t_fixed >= 0.0) || !t_fixed.is_finite() {
        return Err(Error::Input(format!("fixed time must be non-negative, got {t_fixed}")));
    }
    let to_d = |v: f64| match spec.units {
        BoundUnits::Physical => v,
        BoundUnits::Reduced => v / (2.0 * template.transition_wavenumber),
    };
    let distances: Vec<f64> = spec.points().into_iter().map(to_d).collect();
    let rows = distances
        .par_iter()
        .map(|&d| {
            let s = template.with_distance(d)?;
            let m = model.clone().with_exclusion(spec.exclusion.half_width(&s));
            let (x0, a, force) = evaluate(&m, &s, t_fixed)?;
            Ok(ScanRow {
                coordinate: d,
                x0,
                a,
                force,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let k2 = 2.0 * template.transition_wavenumber;
    let static_zeros = static_force_zeros(k2 * to_d(spec.min), k2 * to_d(spec.max))?
        .into_iter()
        .map(|x| (x, x / k2))
        .collect();
    let warnings = validity_warning(template, t_fixed).into_iter().collect();
    Ok(ScanResult {
        scenario: *template,
        spec: spec.clone(),
        t_fixed: Some(t_fixed),
        rows,
        warnings,
        static_zeros,
    })
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl ScanResult {
    /// CSV with a `#` header block. Identical inputs give identical bytes.
    pub fn to_csv(&self, version: &str) -> String {
        let mut out = String::new();
        let doc = ScenarioDocument::from_scenario(&self.scenario);
        let json = serde_json::to_string(&doc).expect("scenario serializes");
        let _ = writeln!(out, "# casimir {version}");
        let _ = writeln!(out, "# scenario: {json}");
        let _ = writeln!(out, "# scan: {}", self.spec.describe());
        if let Some(t) = self.t_fixed {
            let _ = writeln!(out, "# t_fixed: {}", num(t));
        }
        for w in &self.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
        let first = match self.spec.variable {
            ScanVariable::Time => "t",
            ScanVariable::Distance => "d",
        };
        let _ = writeln!(out, "{first},x0,a,regime,phi_static,phi_dyn,phi_total,force_physical");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                num(r.coordinate),
                num(r.x0),
                num(r.a),
                r.force.regime.as_str(),
                opt((r.force.regime != Regime::LightCone).then_some(r.force.phi_static)),
                opt(r.force.phi_dyn),
                opt(r.force.phi_total),
                opt(r.force.physical_value)
            );
        }
        if self.spec.variable == ScanVariable::Distance {
            let _ = writeln!(out, "# static_force_zeros: {}", self.static_zeros.len());
            let _ = writeln!(out, "# x0,d");
            for (x0, d) in &self.static_zeros {
                let _ = writeln!(out, "# {},{}", num(*x0), num(*d));
            }
        }
        out
    }

    pub fn light_cone_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.force.regime == Regime::LightCone).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_wall() -> Scenario {
        Scenario::new(1.0, 1.0, 20.0, UnitSystem::Natural).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ScanSpec::new(ScanVariable::Time, 1.0, 1.0, 10).validate().is_err());
        assert!(ScanSpec::new(ScanVariable::Time, 0.0, 1.0, 1).validate().is_err());
        assert!(ScanSpec::new(ScanVariable::Distance, 0.0, 1.0, 5).validate().is_err());
        let mut s = ScanSpec::new(ScanVariable::Time, 0.0, 1.0, 5);
        s.exclusion = Exclusion::Reduced(0.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn points_hit_both_ends() {
        let p = ScanSpec::new(ScanVariable::Time, 0.1, 0.7, 7).points();
        assert_eq!(p.len(), 7);
        assert_eq!(p[0], 0.1);
        assert_eq!(p[6], 0.7);
    }

    #[test]
    fn light_cone_rows_are_flagged_not_fatal() {
        let spec = ScanSpec::new(ScanVariable::Time, 0.0, 80.0, 5);
        let r = run_time_scan(&unit_wall(), &spec, &ForceModel::default()).unwrap();
        assert_eq!(r.light_cone_rows(), 1);
        let lc = &r.rows[2];
        assert_eq!(lc.force.regime, Regime::LightCone);
        assert!(lc.force.phi_total.is_none());
        let csv = r.to_csv("test");
        let line = csv.lines().find(|l| l.contains("LightCone")).unwrap();
        assert!(line.ends_with("LightCone,,,,"));
    }

    #[test]
    fn default_exclusion_covers_the_time_window_in_si() {
        let s = Scenario::new(1e-29, 1.0 / 19.34e-9, 7.03e-8, UnitSystem::Si).unwrap();
        let w = Exclusion::Default.half_width(&s);
        assert!((w - s.exclusion_from_time(LIGHT_CONE_TIME_WINDOW)).abs() < 1e-15);
        assert!(w > 0.1);
    }
}
