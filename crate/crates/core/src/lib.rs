//! Dynamical Casimir–Polder force on an initially excited two-level atom near
//! a perfectly conducting plane.
//!
//! The closed forms live in [`force`]; [`oracle`] holds brute-force
//! quadrature and mode-sum evaluations used to validate them, and [`report`]
//! packages those comparisons. [`scan`] produces the tabulated time and
//! distance scans consumed by the command-line tool.

pub mod error;
pub mod force;
pub mod oracle;
mod quad;
pub mod report;
pub mod roots;
pub mod scan;
pub mod scenario;
pub mod specfun;

pub use error::{Error, Result};
pub use force::{
    dynamical_force, energy_shift, static_force, static_force_first_maximum, static_force_zeros,
    total_force, ForceModel, ForceResult, Term, TermBreakdown, Transcription,
};
pub use oracle::{EnergyMethod, EnergyShiftResult, ModeSumSettings, QuadratureSettings};
pub use quad::extrapolate_to_zero;
pub use scenario::{
    force_scale, reduce, reduce_with_exclusion, roundtrip_time, ReducedPoint, Regime, Scenario,
    ScenarioDocument, UnitSystem,
};
pub use specfun::{aux_fg, cos_integral, sici, sin_integral, AuxPair};
