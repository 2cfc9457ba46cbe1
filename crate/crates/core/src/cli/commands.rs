//! Experiment dispatch and pass/fail checks per subcommand.

use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use super::config::{RunConfig, Subcommand};
use super::csv::{emit_csv, format_csv, read_csv};
use crate::dispersion::WaveMag;
use crate::error::Result;
use crate::green::{sum_mode_evolve, SumModeIC};
use crate::harness::{
    coefficient_checks, linear_oracle, mode_slopes, propagator_conservation, richardson, root_structure,
    run_linear_diff_decay, run_linear_sum_decay, run_nonlinear, transverse_check, DecayModel, NonlinearConfig,
    SeriesSet, TimeSeries,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub series: SeriesSet,
    pub checks: Vec<Check>,
    /// Reported but not checked.
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const MODE_KMAGS: [f64; 3] = [0.05, 0.1, 0.2];
pub const RICHARDSON_DTS: [f64; 3] = [0.03, 0.015, 0.0075];
pub const RICHARDSON_T_END: f64 = 0.96;
pub const ORACLE_AMPLITUDE: f64 = 1e-8;

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.subcommand {
        Subcommand::Roots => roots(cfg),
        Subcommand::GreenVerify => green_verify(cfg),
        Subcommand::LinearDecay => linear_decay(cfg),
        Subcommand::Nonlinear => nonlinear(cfg),
        Subcommand::Fit => fit(cfg),
    }
}

fn roots(cfg: &RunConfig) -> Result<Outcome> {
    let (r, series) = root_structure(cfg.k_lo, cfg.k_hi, cfg.samples)?;
    let checks = vec![
        Check::new("sigma_in_range", r.sigma_in_range, "sigma in (-1/2, 0)"),
        Check::new("beta_in_range", r.beta_in_range, "beta in (-1, -3/4)"),
        Check::new("sigma_monotone", r.sigma_monotone, "sigma strictly decreasing in |k|"),
        Check::new("root_residual", r.max_residual < 1e-12, format!("max |F(sigma)|/max(1,k^2) = {:.3e}", r.max_residual)),
        Check::new("small_k_limit", r.small_k_error < 0.02, format!("|sigma/k^2 + 1| = {:.3e} at k = {}", r.small_k_error, cfg.k_lo)),
        Check::new(
            "large_k_limit",
            r.large_k_error < 0.02,
            format!("|(sigma+1/2) 16 k^2 - 1| = {:.3e} at k = {}", r.large_k_error, cfg.k_hi),
        ),
    ];
    Ok(Outcome { series, checks, notes: Vec::new() })
}

fn green_verify(cfg: &RunConfig) -> Result<Outcome> {
    let co = coefficient_checks(1000, cfg.seed)?;
    let mut checks = vec![
        Check::new("reconstruction", co.max_reconstruction < 1e-13, format!("max |U(0) - U_0| = {:.3e}", co.max_reconstruction)),
        Check::new("ode_residual", co.max_ode_residual < 1e-9, format!("max residual/((1+k^3)|ic|) = {:.3e}", co.max_ode_residual)),
    ];
    let notes = co
        .disagreements
        .iter()
        .map(|(k, ch, i, j)| format!("closed-form {ch} map entry ({i},{j}) disagrees with the direct solve at |k| = {k}"))
        .collect();

    let tr = transverse_check(&[0.0, 2f64.ln(), 5.0], 100, cfg.seed)?;
    checks.push(Check::new("transverse_decay", tr < 1e-10, format!("max | |u_perp(t)|/|u_perp(0)| - e^-t | = {tr:.3e}")));

    let mut series = Vec::new();
    for m in mode_slopes(&MODE_KMAGS)? {
        let e = m.relative_error();
        checks.push(Check::new(
            format!("mode_slope_k{}", m.kmag),
            e < 0.01,
            format!("slope {:.6} vs sigma {:.6} (rel {e:.2e})", m.fit.slope, m.sigma),
        ));
        let times: Vec<f64> = (0..=100).map(|i| 2.0 * i as f64).collect();
        let wm = WaveMag::new(m.kmag)?;
        let ic = SumModeIC::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let values = times.iter().map(|&t| sum_mode_evolve(wm, ic, t).map(|v| v[0].norm())).collect::<Result<Vec<_>>>()?;
        series.push(TimeSeries::new(format!("rho2_abs_k{}", m.kmag), times, values)?);
    }

    let times: Vec<f64> = (0..=20).map(|i| 5.0 * i as f64).collect();
    let c = propagator_conservation(100, &times, cfg.seed)?;
    checks.push(Check::new(
        "constraint_conservation",
        c.passes(1e-9),
        format!("max gauss {:.3e}, max div B {:.3e} over t in [0, 100]", c.max_gauss, c.max_div_b),
    ));
    Ok(Outcome { series: SeriesSet { series }, checks, notes })
}

fn slope_check(set: &SeriesSet, label: &str, window: (f64, f64), model: DecayModel, target: f64, tol: f64) -> Check {
    match set.fit(label, window, model) {
        Ok(f) => Check::new(
            format!("{label}_slope"),
            f.within(target, tol),
            format!("slope {:.4} (stderr {:.1e}) target {target} +- {tol}", f.slope, f.stderr),
        ),
        Err(e) => Check::new(format!("{label}_slope"), false, e.to_string()),
    }
}

fn linear_decay(cfg: &RunConfig) -> Result<Outcome> {
    let lc = cfg.linear()?;
    let mut series = run_linear_sum_decay(&lc)?;
    series.extend(run_linear_diff_decay(&lc)?);
    let w = lc.window;
    let pl = DecayModel::Powerlaw;
    let mut checks: Vec<Check> = [
        ("rho2_L2", -0.75, 0.05),
        ("theta2_L2", -0.75, 0.05),
        ("u2_L2", -1.25, 0.05),
        ("grad_rho2_L2", -1.25, 0.05),
        ("grad_theta2_L2", -1.25, 0.05),
        ("B_L2", -0.75, 0.05),
        ("E_L2", -1.25, 0.05),
        ("u1_L2", -1.25, 0.05),
        ("B_L1hat", -1.5, 0.1),
    ]
    .iter()
    .map(|&(l, t, tol)| slope_check(&series, l, w, pl, t, tol))
    .collect();
    let name = "rho1_theta1_L2_rate";
    checks.push(match series.fit("rho1_theta1_L2", lc.exp_window, DecayModel::Exponential) {
        Ok(f) => Check::new(name, f.slope <= -0.48, format!("rate {:.4} (stderr {:.1e}) must be <= -0.48", f.slope, f.stderr)),
        Err(e) => Check::new(name, false, e.to_string()),
    });
    let mut notes = Vec::new();
    for label in ["grad_u2_L2", "rho2_L1hat", "u2_L1hat", "theta2_L1hat", "grad_B_L2", "E_L1hat", "u1_L1hat"] {
        if let Ok(f) = series.fit(label, w, pl) {
            notes.push(format!("{label} slope {:.4}", f.slope));
        }
    }
    Ok(Outcome { series, checks, notes })
}

fn nonlinear(cfg: &RunConfig) -> Result<Outcome> {
    let nc = cfg.nonlinear();
    let run = run_nonlinear(&nc)?;
    let s = run.summary;
    let mut checks = vec![
        Check::new("energy_monotone", s.max_rel_increase <= 1e-8, format!("max relative step increase of E_s {:.3e}", s.max_rel_increase)),
        Check::new(
            "high_energy_monotone",
            s.max_rel_increase_h <= 1e-8,
            format!("max relative step increase of E_s^h {:.3e}", s.max_rel_increase_h),
        ),
        Check::new(
            "constraint_drift",
            s.gauss_drift < 1e-9 && s.div_b_drift < 1e-9,
            format!("gauss {:.3e}, div B {:.3e}", s.gauss_drift, s.div_b_drift),
        ),
    ];
    let oracle = linear_oracle(&NonlinearConfig { amplitude: ORACLE_AMPLITUDE, ..nc })?;
    checks.push(Check::new(
        "linear_oracle",
        oracle.passes(),
        format!("one-step error {:.3e} vs bound {:.3e} at amplitude {:e}", oracle.error, oracle.bound(), oracle.amplitude),
    ));
    let rich = richardson(&NonlinearConfig { t_end: RICHARDSON_T_END, ..nc }, &RICHARDSON_DTS)?;
    let order = rich.min_order();
    checks.push(Check::new("richardson_order", order >= 3.7, format!("measured order {order:.4} (orders {:?})", rich.orders)));
    let notes = vec![
        format!("steps {}", s.steps),
        format!("E_s/||U||_s^2 in [{:.6}, {:.6}]", s.min_equivalence, s.max_equivalence),
        format!("effective lambda in [{:.4e}, {:.4e}]", s.min_lambda, s.max_lambda),
        format!("difference channels decay at least as fast as sum channels: {}", s.difference_faster),
    ];
    Ok(Outcome { series: run.series, checks, notes })
}

fn fit(cfg: &RunConfig) -> Result<Outcome> {
    let input = cfg.input.as_deref().expect("validated");
    let channel = cfg.channel.as_deref().expect("validated");
    let set = read_csv(input)?;
    let f = set.fit(channel, (cfg.t_lo, cfg.t_hi), cfg.model)?;
    let row = |l: &str, v: f64| TimeSeries::new(l, vec![0.0], vec![v]);
    let series = vec![
        row("intercept", f.intercept)?,
        row("samples", f.samples as f64)?,
        row("slope", f.slope)?,
        row("stderr", f.stderr)?,
        row("window_hi", f.window.1)?,
        row("window_lo", f.window.0)?,
    ];
    let mut checks = Vec::new();
    if let Some(target) = cfg.target {
        checks.push(Check::new(
            format!("{channel}_slope"),
            f.within(target, cfg.tol),
            format!("slope {:.4} target {target} +- {}", f.slope, cfg.tol),
        ));
    }
    let notes = vec![format!("{channel}: slope {:.6} stderr {:.2e} over {} samples", f.slope, f.stderr, f.samples)];
    Ok(Outcome { series: SeriesSet { series }, checks, notes })
}

/// `<out>.config.json` next to the CSV.
pub fn config_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".config.json");
    PathBuf::from(s)
}

/// Run, write the CSV and resolved config, and report; `Ok(true)` iff every check passed.
pub fn execute(cfg: &RunConfig) -> Result<bool> {
    let outcome = run(cfg)?;
    let mut report: Box<dyn Write> = match &cfg.out {
        Some(out) => {
            emit_csv(&outcome.series, out)?;
            std::fs::write(config_path(out), cfg.to_json())?;
            Box::new(std::io::stdout())
        }
        None => {
            print!("{}", format_csv(&outcome.series)?);
            Box::new(std::io::stderr())
        }
    };
    for n in &outcome.notes {
        writeln!(report, "NOTE {n}")?;
    }
    for c in &outcome.checks {
        writeln!(report, "{c}")?;
    }
    Ok(outcome.passed())
}
