use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use emlab::cli::{format_csv, parse_config, run as run_config, Subcommand};
use emlab::dispersion::{charpoly_eval, WaveMag};
use emlab::green::{DiffModeState, DiffWaveVector, SumModeIC};
use emlab::harness::{DecayModel, TimeSeries};

fn err(e: emlab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn wave(kmag: f64) -> PyResult<WaveMag> {
    WaveMag::new(kmag).map_err(err)
}

/// `(sigma, beta, omega)` for one magnitude.
#[pyfunction]
fn root_triple(kmag: f64) -> PyResult<(f64, f64, f64)> {
    let r = emlab::dispersion::root_triple(wave(kmag)?).map_err(err)?;
    Ok((r.sigma, r.beta, r.omega))
}

#[pyfunction]
fn charpoly(kmag: f64, x: f64) -> PyResult<f64> {
    Ok(charpoly_eval(wave(kmag)?, x))
}

/// Nine coefficients, three per channel in the order rho, theta, ulong.
#[pyfunction]
fn sum_mode_coefficients(kmag: f64, rho0: Complex64, ulong0: Complex64, theta0: Complex64) -> PyResult<Vec<Complex64>> {
    let c = emlab::green::sum_mode_coefficients(wave(kmag)?, SumModeIC::new(rho0, ulong0, theta0)).map_err(err)?;
    Ok(c.c.to_vec())
}

/// `(rho_2, ulong_2, theta_2)` at time `t`.
#[pyfunction]
fn sum_mode_evolve(
    kmag: f64,
    rho0: Complex64,
    ulong0: Complex64,
    theta0: Complex64,
    t: f64,
) -> PyResult<(Complex64, Complex64, Complex64)> {
    let v = emlab::green::sum_mode_evolve(wave(kmag)?, SumModeIC::new(rho0, ulong0, theta0), t).map_err(err)?;
    Ok((v[0], v[1], v[2]))
}

/// Eleven-component difference state (rho1, u1, theta1, E, B) at time `t`.
#[pyfunction]
fn diff_mode_evolve(k: [f64; 3], state: Vec<Complex64>, t: f64) -> PyResult<Vec<Complex64>> {
    if state.len() != 11 {
        return Err(PyValueError::new_err(format!("state needs 11 components, got {}", state.len())));
    }
    let kv = DiffWaveVector::new(k).map_err(err)?;
    let s = emlab::green::diff_mode_evolve(&kv, &DiffModeState::from_slice(&state), t).map_err(err)?;
    Ok(s.to_array().to_vec())
}

/// OLS decay fit; returns a dict with slope, stderr, intercept and samples.
#[pyfunction]
#[pyo3(signature = (times, values, lo, hi, model = "powerlaw"))]
fn fit_decay<'py>(
    py: Python<'py>,
    times: Vec<f64>,
    values: Vec<f64>,
    lo: f64,
    hi: f64,
    model: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let m: DecayModel = model.parse().map_err(err)?;
    let s = TimeSeries::new("series", times, values).map_err(err)?;
    let f = emlab::harness::fit_decay(&s, (lo, hi), m).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("slope", f.slope)?;
    d.set_item("stderr", f.stderr)?;
    d.set_item("intercept", f.intercept)?;
    d.set_item("samples", f.samples)?;
    Ok(d)
}

/// Run a subcommand with `key -> value` overrides; returns `(passed, csv, checks)`.
#[pyfunction]
#[pyo3(signature = (subcommand, overrides = None))]
fn run(
    subcommand: &str,
    overrides: Option<Vec<(String, String)>>,
) -> PyResult<(bool, String, Vec<(String, bool, String)>)> {
    let sub = match subcommand {
        "roots" => Subcommand::Roots,
        "green-verify" => Subcommand::GreenVerify,
        "linear-decay" => Subcommand::LinearDecay,
        "nonlinear" => Subcommand::Nonlinear,
        "fit" => Subcommand::Fit,
        _ => return Err(PyValueError::new_err(format!("unknown subcommand `{subcommand}`"))),
    };
    let cfg = parse_config(sub, None, &overrides.unwrap_or_default()).map_err(err)?;
    let o = run_config(&cfg).map_err(err)?;
    let csv = format_csv(&o.series).map_err(err)?;
    let checks = o.checks.iter().map(|c| (c.name.clone(), c.pass, c.detail.clone())).collect();
    Ok((o.passed(), csv, checks))
}

#[pymodule]
fn emlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(root_triple, m)?)?;
    m.add_function(wrap_pyfunction!(charpoly, m)?)?;
    m.add_function(wrap_pyfunction!(sum_mode_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(sum_mode_evolve, m)?)?;
    m.add_function(wrap_pyfunction!(diff_mode_evolve, m)?)?;
    m.add_function(wrap_pyfunction!(fit_decay, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
