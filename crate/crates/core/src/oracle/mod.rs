//! Independent numerical checks of the closed forms: Abel-regularized
//! quadrature of the energy integral, finite-difference forces, and a
//! discrete cavity mode sum.

mod abel;
mod finite_diff;
mod mode_sum;

pub use abel::{
    energy_quadrature, energy_quadrature_operator_form, operator_stencil, static_energy_quadrature,
    EnergyMethod, EnergyShiftResult, QuadraturePlan, QuadratureSettings,
};
pub use finite_diff::{
    force_finite_difference, force_finite_difference_reduced, static_force_finite_difference,
    FiniteDifferenceForce,
};
pub use mode_sum::{mode_sum_energy, ModeSumResult, ModeSumSettings};
