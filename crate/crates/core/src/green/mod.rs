//! Exact Fourier-space evolution of the linearized sum and difference systems.

pub mod diff;
pub mod sum;

pub use diff::{
    check_constraints, diff_mode_evolve, diff_mode_matrix, diff_propagator, gauss_longitudinal_e, DiffGenerator,
    DiffModeState, DiffWaveVector,
};
pub use sum::{
    closed_form_agreement, closed_form_coefficients, sum_ic_derivatives, sum_mode_coefficients, sum_mode_evolve,
    sum_perp_evolve, ClosedFormAgreement, ModeCoefficients, SumIcDerivatives, SumModeIC, SumPropagator,
};
