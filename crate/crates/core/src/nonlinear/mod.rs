//! Nonlinear bipolar dynamics on the periodic box.

pub mod data;
pub mod energy;
pub mod solver;
pub mod state;
pub mod terms;

pub use data::{well_prepared, DataSpec};
pub use energy::{energy_report, EnergyReport, EnergyWeights};
pub use solver::{Solver, SolverConfig};
pub use state::{constraint_residual, from_sum_diff, to_sum_diff, SumDiff, TorusState, FIELD_NAMES};
pub use terms::{nonlinear_terms, NonlinearTerms};
