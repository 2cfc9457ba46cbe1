//! Decay experiments, rate fits and small-data torus runs.

pub mod fit;
pub mod linear;
pub mod nonlinear;
pub mod verify;

pub use fit::{fit_decay, DecayFit, DecayModel, TimeSeries};
pub use linear::{
    block_propagator, mode_log_slope, run_linear_diff_decay, run_linear_sum_decay, LinearDecayConfig, ModeSlope,
    SeriesSet,
};
pub use nonlinear::{
    channel_norms, linear_oracle, richardson, run_nonlinear, NonlinearConfig, NonlinearRun, NonlinearSummary,
    OracleReport, RichardsonReport,
};
pub use verify::{
    coefficient_checks, mode_slopes, propagator_conservation, random_constrained_mode, root_structure,
    transverse_check, CoefficientReport, ConservationReport, RootStructure,
};
