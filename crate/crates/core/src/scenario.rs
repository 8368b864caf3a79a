//! Physical parameters of one atom–wall configuration and their reduction to
//! the dimensionless pair `(x0, a)` used by every computation in this crate.
//!
//! Gaussian units are the native physical layer. SI values are converted at
//! the boundary (`μ² → μ²/(4πε₀)`), and a "natural" system with `c = 1` and
//! arbitrary length units is provided for the textbook parameter sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;
/// Speed of light in cm/s.
pub const SPEED_OF_LIGHT_GAUSSIAN: f64 = 2.997_924_58e10;
/// statC per coulomb.
pub const STATC_PER_COULOMB: f64 = 2.997_924_58e9;
/// Coulomb constant `1/(4πε₀)` in N·m²/C².
pub const COULOMB_CONSTANT: f64 = 8.987_551_792_3e9;

/// Default light-cone exclusion half-width in `a`.
pub const DEFAULT_EXCLUSION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnitSystem {
    /// statC·cm, cm, s.
    Gaussian,
    /// C·m, m, s.
    #[serde(rename = "SI")]
    Si,
    /// Arbitrary length and time units with `c = 1`.
    #[serde(rename = "natural")]
    Natural,
}

impl UnitSystem {
    pub fn speed_of_light(self) -> f64 {
        match self {
            UnitSystem::Gaussian => SPEED_OF_LIGHT_GAUSSIAN,
            UnitSystem::Si => SPEED_OF_LIGHT_SI,
            UnitSystem::Natural => 1.0,
        }
    }
}

impl fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitSystem::Gaussian => "Gaussian",
            UnitSystem::Si => "SI",
            UnitSystem::Natural => "natural",
        })
    }
}

/// An isotropic two-level atom at distance `d` from a perfectly conducting
/// plane. All quantities are expressed in `unit_system`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    /// Full dipole magnitude μ; the isotropic average `μ²/3` per axis is part
    /// of the force formulas.
    pub dipole_moment: f64,
    /// `k0 = ω0/c`.
    pub transition_wavenumber: f64,
    pub distance: f64,
    pub unit_system: UnitSystem,
}

impl Scenario {
    pub fn new(
        dipole_moment: f64,
        transition_wavenumber: f64,
        distance: f64,
        unit_system: UnitSystem,
    ) -> Result<Self> {
        let s = Scenario {
            dipole_moment,
            transition_wavenumber,
            distance,
            unit_system,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be positive and finite, got {v}")))
            }
        };
        check("dipole_moment", self.dipole_moment)?;
        check("transition_wavenumber", self.transition_wavenumber)?;
        check("distance", self.distance)
    }

    pub fn speed_of_light(&self) -> f64 {
        self.unit_system.speed_of_light()
    }

    pub fn wavelength(&self) -> f64 {
        std::f64::consts::TAU / self.transition_wavenumber
    }

    /// Same configuration at another distance.
    pub fn with_distance(&self, distance: f64) -> Result<Self> {
        Scenario::new(
            self.dipole_moment,
            self.transition_wavenumber,
            distance,
            self.unit_system,
        )
    }

    /// Express an SI scenario in Gaussian units. Gaussian and natural
    /// scenarios are returned unchanged.
    pub fn to_gaussian(&self) -> Scenario {
        match self.unit_system {
            UnitSystem::Si => Scenario {
                dipole_moment: self.dipole_moment * STATC_PER_COULOMB * 100.0,
                transition_wavenumber: self.transition_wavenumber / 100.0,
                distance: self.distance * 100.0,
                unit_system: UnitSystem::Gaussian,
            },
            _ => *self,
        }
    }

    /// Express a Gaussian scenario in SI units. SI and natural scenarios are
    /// returned unchanged.
    pub fn to_si(&self) -> Scenario {
        match self.unit_system {
            UnitSystem::Gaussian => Scenario {
                dipole_moment: self.dipole_moment / (STATC_PER_COULOMB * 100.0),
                transition_wavenumber: self.transition_wavenumber * 100.0,
                distance: self.distance / 100.0,
                unit_system: UnitSystem::Si,
            },
            _ => *self,
        }
    }

    /// Light-cone half-width in `a` corresponding to a time window in the
    /// scenario's time unit.
    pub fn exclusion_from_time(&self, window: f64) -> f64 {
        self.speed_of_light() * window / (2.0 * self.distance)
    }

    /// Time at which the reduced time coordinate equals `a`.
    pub fn time_at(&self, a: f64) -> f64 {
        2.0 * self.distance * a / self.speed_of_light()
    }
}

/// Temporal regime relative to the round-trip time `2d/c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    BeforeRoundTrip,
    AfterRoundTrip,
    LightCone,
}

impl Regime {
    /// Classify `a` against a light-cone exclusion half-width.
    pub fn classify(a: f64, half_width: f64) -> Regime {
        if (a - 1.0).abs() < half_width {
            Regime::LightCone
        } else if a < 1.0 {
            Regime::BeforeRoundTrip
        } else {
            Regime::AfterRoundTrip
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::BeforeRoundTrip => "BeforeRoundTrip",
            Regime::AfterRoundTrip => "AfterRoundTrip",
            Regime::LightCone => "LightCone",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `x0 = 2 k0 d`, `a = c t / 2d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedPoint {
    pub x0: f64,
    pub a: f64,
    pub regime: Regime,
}

impl ReducedPoint {
    pub fn new(x0: f64, a: f64, half_width: f64) -> Result<Self> {
        if !(x0 > 0.0) || !x0.is_finite() {
            return Err(Error::Domain(format!("x0 must be positive, got {x0}")));
        }
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::Domain(format!("a must be non-negative, got {a}")));
        }
        Ok(ReducedPoint {
            x0,
            a,
            regime: Regime::classify(a, half_width),
        })
    }
}

/// Reduce with the default exclusion half-width.
pub fn reduce(s: &Scenario, t: f64) -> Result<ReducedPoint> {
    reduce_with_exclusion(s, t, DEFAULT_EXCLUSION)
}

pub fn reduce_with_exclusion(s: &Scenario, t: f64, half_width: f64) -> Result<ReducedPoint> {
    s.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    let x0 = 2.0 * s.transition_wavenumber * s.distance;
    let a = s.speed_of_light() * t / (2.0 * s.distance);
    ReducedPoint::new(x0, a, half_width)
}

/// `2d/c` in the scenario's time unit.
pub fn roundtrip_time(s: &Scenario) -> f64 {
    2.0 * s.distance / s.speed_of_light()
}

/// Multiplier turning a dimensionless force `Φ` into a physical force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceScale {
    /// `μ²/d⁴` in Gaussian units (dyn), or in arbitrary units for natural
    /// scenarios.
    pub gaussian_scale: f64,
    /// `μ²/(4πε₀ d⁴)` in newtons; present for SI scenarios.
    pub si_scale: Option<f64>,
}

impl ForceScale {
    /// The scale in the scenario's own force unit.
    pub fn native(&self) -> f64 {
        self.si_scale.unwrap_or(self.gaussian_scale)
    }
}

pub fn force_scale(s: &Scenario) -> ForceScale {
    match s.unit_system {
        UnitSystem::Si => {
            let g = s.to_gaussian();
            ForceScale {
                gaussian_scale: g.dipole_moment.powi(2) / g.distance.powi(4),
                si_scale: Some(COULOMB_CONSTANT * s.dipole_moment.powi(2) / s.distance.powi(4)),
            }
        }
        _ => ForceScale {
            gaussian_scale: s.dipole_moment.powi(2) / s.distance.powi(4),
            si_scale: None,
        },
    }
}

/// Length units accepted in scenario documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthUnit {
    Meter,
    Centimeter,
    Micrometer,
    Nanometer,
    Arbitrary,
}

impl LengthUnit {
    fn in_meters(self) -> Option<f64> {
        match self {
            LengthUnit::Meter => Some(1.0),
            LengthUnit::Centimeter => Some(1e-2),
            LengthUnit::Micrometer => Some(1e-6),
            LengthUnit::Nanometer => Some(1e-9),
            LengthUnit::Arbitrary => None,
        }
    }

    /// Factor converting this unit to the base length of `system`.
    fn factor_to(self, system: UnitSystem) -> Result<f64> {
        match (system, self.in_meters()) {
            (UnitSystem::Natural, None) => Ok(1.0),
            (UnitSystem::Natural, Some(_)) => Err(Error::Input(
                "natural-unit scenarios take distance_unit \"arb\"".into(),
            )),
            (_, None) => Err(Error::Input(format!(
                "distance_unit \"arb\" requires unit_system \"natural\", not {system}"
            ))),
            (UnitSystem::Si, Some(m)) => Ok(m),
            (UnitSystem::Gaussian, Some(m)) => Ok(m * 100.0),
        }
    }
}

impl FromStr for LengthUnit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "m" => LengthUnit::Meter,
            "cm" => LengthUnit::Centimeter,
            "um" | "µm" | "μm" => LengthUnit::Micrometer,
            "nm" => LengthUnit::Nanometer,
            "arb" => LengthUnit::Arbitrary,
            other => return Err(Error::Input(format!("unknown distance_unit {other:?}"))),
        })
    }
}

fn dipole_factor(unit: &str, system: UnitSystem) -> Result<f64> {
    let si = matches!(unit, "C·m" | "C*m" | "Cm");
    let gaussian = matches!(unit, "statC·cm" | "statC*cm" | "statCcm");
    match system {
        UnitSystem::Si if si => Ok(1.0),
        UnitSystem::Si if gaussian => Ok(1.0 / (STATC_PER_COULOMB * 100.0)),
        UnitSystem::Gaussian if gaussian => Ok(1.0),
        UnitSystem::Gaussian if si => Ok(STATC_PER_COULOMB * 100.0),
        UnitSystem::Natural if unit == "arb" => Ok(1.0),
        _ => Err(Error::Input(format!(
            "dipole_unit {unit:?} is not usable with unit_system {system}"
        ))),
    }
}

/// JSON form of a scenario. Exactly one of `wavelength` / `wavenumber` must be
/// given; both are expressed in `distance_unit` (or its inverse).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub dipole_moment: f64,
    pub dipole_unit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavenumber: Option<f64>,
    pub distance: f64,
    pub distance_unit: String,
    pub unit_system: UnitSystem,
}

impl ScenarioDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("scenario JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scenario documents always serialize")
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        let system = self.unit_system;
        let length = self.distance_unit.parse::<LengthUnit>()?.factor_to(system)?;
        let k0 = match (self.wavelength, self.wavenumber) {
            (Some(_), Some(_)) => {
                return Err(Error::Input(
                    "give either wavelength or wavenumber, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Input("one of wavelength or wavenumber is required".into()))
            }
            (Some(lambda), None) => std::f64::consts::TAU / (lambda * length),
            (None, Some(k)) => k / length,
        };
        Scenario::new(
            self.dipole_moment * dipole_factor(&self.dipole_unit, system)?,
            k0,
            self.distance * length,
            system,
        )
    }

    /// Document describing `s` in its own base units, using the wavenumber.
    pub fn from_scenario(s: &Scenario) -> Self {
        let (dipole_unit, distance_unit) = match s.unit_system {
            UnitSystem::Si => ("C·m", "m"),
            UnitSystem::Gaussian => ("statC·cm", "cm"),
            UnitSystem::Natural => ("arb", "arb"),
        };
        ScenarioDocument {
            dipole_moment: s.dipole_moment,
            dipole_unit: dipole_unit.into(),
            wavelength: None,
            wavenumber: Some(s.transition_wavenumber),
            distance: s.distance,
            distance_unit: distance_unit.into(),
            unit_system: s.unit_system,
        }
    }
}
