//! Linearized Green's functions, dispersion analysis, energy functionals and
//! pseudo-spectral nonlinear dynamics for the bipolar non-isentropic
//! Euler-Maxwell system with relaxation.

pub mod cli;
pub mod dispersion;
pub mod error;
pub mod green;
pub mod harness;
pub mod linalg;
pub mod nonlinear;
pub mod norms;
pub mod spectral;

pub use error::{Error, Result};
