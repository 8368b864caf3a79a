//! Figure presets shipped with the binary.

use casimir_core::scan::{BoundUnits, ScanSpec, ScanVariable};
use casimir_core::{Error, Result, ScenarioDocument};
use serde::Deserialize;

pub const PRESETS: [(&str, &str); 3] = [
    ("fig1", include_str!("../presets/fig1.json")),
    ("fig2", include_str!("../presets/fig2.json")),
    ("fig3-excited", include_str!("../presets/fig3-excited.json")),
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preset {
    pub description: String,
    pub scan: PresetScan,
    #[serde(default)]
    pub t_fixed: Option<f64>,
    pub runs: Vec<PresetRun>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetScan {
    pub variable: Variable,
    pub min: f64,
    pub max: f64,
    pub samples: usize,
    pub units: Units,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    Time,
    Distance,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Physical,
    Reduced,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetRun {
    pub label: String,
    pub scenario: ScenarioDocument,
}

impl PresetScan {
    pub fn spec(&self) -> ScanSpec {
        let variable = match self.variable {
            Variable::Time => ScanVariable::Time,
            Variable::Distance => ScanVariable::Distance,
        };
        let mut spec = ScanSpec::new(variable, self.min, self.max, self.samples);
        spec.units = match self.units {
            Units::Physical => BoundUnits::Physical,
            Units::Reduced => BoundUnits::Reduced,
        };
        spec
    }
}

pub fn source(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            Error::Input(format!("unknown preset {name:?}; available: {}", names.join(", ")))
        })
}

pub fn load(name: &str) -> Result<Preset> {
    serde_json::from_str(source(name)?).map_err(|e| Error::Input(format!("preset {name}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_build_scenarios() {
        for (name, _) in PRESETS {
            let p = load(name).unwrap();
            assert!(!p.runs.is_empty());
            p.scan.spec().validate().unwrap();
            for r in &p.runs {
                r.scenario.to_scenario().unwrap();
            }
        }
    }

    #[test]
    fn unknown_preset_lists_names() {
        let err = load("fig9").unwrap_err().to_string();
        assert!(err.contains("fig1") && err.contains("fig3-excited"));
    }
}
