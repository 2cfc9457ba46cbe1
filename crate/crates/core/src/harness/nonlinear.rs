//! Small-data torus runs: energy monitoring, convergence order and the linear oracle.

use num_complex::Complex64;

use super::fit::TimeSeries;
use super::linear::SeriesSet;
use crate::dispersion::WaveMag;
use crate::error::Result;
use crate::green::diff::propagator_matrix;
use crate::green::{diff_mode_evolve, sum_mode_evolve, sum_perp_evolve, DiffModeState, DiffWaveVector, SumModeIC};
use crate::nonlinear::solver::SLOTS;
use crate::nonlinear::{well_prepared, DataSpec, EnergyReport, EnergyWeights, Solver, SolverConfig};
use crate::spectral::TorusGrid;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct NonlinearConfig {
    pub n: usize,
    pub l: f64,
    pub dealias: bool,
    pub s: u32,
    pub amplitude: f64,
    pub seed: u64,
    pub kcut: usize,
    pub t_end: f64,
    pub dt: f64,
    pub weights: EnergyWeights,
    pub cfl: f64,
    /// Channel norms are recorded every this many steps (and at the end).
    pub record_every: usize,
}

impl Default for NonlinearConfig {
    fn default() -> Self {
        Self {
            n: 16,
            l: 1.0,
            dealias: true,
            s: 4,
            amplitude: 1e-2,
            seed: 0,
            kcut: 2,
            t_end: 20.0,
            dt: 2.5e-3,
            weights: EnergyWeights::default(),
            cfl: 0.5,
            record_every: 40,
        }
    }
}

impl NonlinearConfig {
    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.n, self.l, self.dealias)
    }

    pub fn data(&self) -> DataSpec {
        DataSpec { amplitude: self.amplitude, seed: self.seed, kcut: self.kcut }
    }

    fn solver(&self) -> Result<Solver> {
        let state = well_prepared(self.grid()?, self.data())?;
        Solver::new(&state, SolverConfig { cfl: self.cfl })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct NonlinearSummary {
    pub steps: usize,
    /// `max_n (E(t_{n+1}) - E(t_n)) / E(t_n)` for `E_s` and `E_s^h`.
    pub max_rel_increase: f64,
    pub max_rel_increase_h: f64,
    pub gauss_drift: f64,
    pub div_b_drift: f64,
    pub min_equivalence: f64,
    pub max_equivalence: f64,
    /// Range of `-(E(t_{n+1}) - E(t_n)) / (dt D(t_n))` over steps with `D > 0`.
    pub min_lambda: f64,
    pub max_lambda: f64,
    /// Normalized difference channels never exceed the matching sum channels.
    pub difference_faster: bool,
}

impl NonlinearSummary {
    pub fn monotone(&self, slack: f64) -> bool {
        self.max_rel_increase <= slack && self.max_rel_increase_h <= slack
    }
}

#[derive(Debug, Clone)]
pub struct NonlinearRun {
    pub series: SeriesSet,
    pub reports: Vec<EnergyReport>,
    pub summary: NonlinearSummary,
}

pub const CHANNEL_LABELS: [&str; 8] = [
    "rho_e_minus_rho_i",
    "rho_e_plus_rho_i",
    "theta_e_minus_theta_i",
    "theta_e_plus_theta_i",
    "u_e_minus_u_i",
    "u_e_plus_u_i",
    "E_L2",
    "B_L2",
];

pub const ENERGY_LABELS: [&str; 7] = ["E_s", "D_s", "E_s_h", "D_s_h", "gauss_residual", "div_b_residual", "lambda_eff"];

/// Continuum `L^2` norms of the groupings in [`CHANNEL_LABELS`].
pub fn channel_norms(solver: &Solver) -> [f64; 8] {
    let sp = solver.spectra();
    let w = solver.grid().spectral_weight();
    let norm = |slots: std::ops::Range<usize>, factor: f64| {
        let s: f64 = slots.map(|k| sp[k].iter().map(|z| z.norm_sqr()).sum::<f64>()).sum();
        factor * (w * s).sqrt()
    };
    [norm(0..1, 2.0), norm(11..12, 2.0), norm(4..5, 2.0), norm(15..16, 2.0), norm(1..4, 2.0), norm(12..15, 2.0), norm(5..8, 1.0), norm(8..11, 1.0)]
}

pub fn run_nonlinear(cfg: &NonlinearConfig) -> Result<NonlinearRun> {
    let mut solver = cfg.solver()?;
    let steps = solver.steps_to(cfg.t_end, cfg.dt);
    let every = cfg.record_every.max(1);

    let mut reports = vec![solver.energy_report(cfg.s, cfg.weights)?];
    let mut norm_t = vec![solver.time()];
    let mut norms = vec![channel_norms(&solver)];
    let mut lambda = Vec::with_capacity(steps);
    for n in 0..steps {
        let h = cfg.dt.min(cfg.t_end - solver.time());
        solver.step(h)?;
        let r = solver.energy_report(cfg.s, cfg.weights)?;
        let prev = reports.last().expect("initial report");
        lambda.push(if prev.d_s > 0.0 { -(r.e_s - prev.e_s) / (h * prev.d_s) } else { 0.0 });
        reports.push(r);
        if (n + 1) % every == 0 || n + 1 == steps {
            norm_t.push(solver.time());
            norms.push(channel_norms(&solver));
        }
    }

    let mut summary = NonlinearSummary {
        steps,
        min_equivalence: f64::INFINITY,
        max_equivalence: f64::NEG_INFINITY,
        min_lambda: f64::INFINITY,
        max_lambda: f64::NEG_INFINITY,
        difference_faster: true,
        ..Default::default()
    };
    let rel = |a: f64, b: f64| if a > 0.0 { (b - a) / a } else if b > 0.0 { f64::INFINITY } else { 0.0 };
    for (i, w) in reports.windows(2).enumerate() {
        summary.max_rel_increase = summary.max_rel_increase.max(rel(w[0].e_s, w[1].e_s));
        summary.max_rel_increase_h = summary.max_rel_increase_h.max(rel(w[0].e_s_h, w[1].e_s_h));
        if w[0].d_s > 0.0 {
            summary.min_lambda = summary.min_lambda.min(lambda[i]);
            summary.max_lambda = summary.max_lambda.max(lambda[i]);
        }
    }
    let r0 = &reports[0];
    for r in &reports {
        summary.gauss_drift = summary.gauss_drift.max((r.gauss_residual - r0.gauss_residual).abs());
        summary.div_b_drift = summary.div_b_drift.max((r.div_b_residual - r0.div_b_residual).abs());
        let q = r.equivalence_ratio();
        summary.min_equivalence = summary.min_equivalence.min(q);
        summary.max_equivalence = summary.max_equivalence.max(q);
    }
    let n0 = norms[0];
    for row in &norms {
        for (d, s) in [(0, 1), (2, 3), (4, 5)] {
            if n0[d] > 0.0 && n0[s] > 0.0 && row[d] / n0[d] > row[s] / n0[s] * (1.0 + 1e-12) {
                summary.difference_faster = false;
            }
        }
    }
    log::info!(
        "effective lambda in [{:.4e}, {:.4e}], E_s/||U||_s^2 in [{:.6}, {:.6}]",
        summary.min_lambda,
        summary.max_lambda,
        summary.min_equivalence,
        summary.max_equivalence
    );

    let times: Vec<f64> = reports.iter().map(|r| r.time).collect();
    let pick = |f: &dyn Fn(&EnergyReport) -> f64| reports.iter().map(f).collect::<Vec<f64>>();
    let mut series = vec![
        TimeSeries::new(ENERGY_LABELS[0], times.clone(), pick(&|r| r.e_s))?,
        TimeSeries::new(ENERGY_LABELS[1], times.clone(), pick(&|r| r.d_s))?,
        TimeSeries::new(ENERGY_LABELS[2], times.clone(), pick(&|r| r.e_s_h))?,
        TimeSeries::new(ENERGY_LABELS[3], times.clone(), pick(&|r| r.d_s_h))?,
        TimeSeries::new(ENERGY_LABELS[4], times.clone(), pick(&|r| r.gauss_residual))?,
        TimeSeries::new(ENERGY_LABELS[5], times.clone(), pick(&|r| r.div_b_residual))?,
        TimeSeries::new(ENERGY_LABELS[6], times[1..].to_vec(), lambda)?,
    ];
    for (c, label) in CHANNEL_LABELS.iter().enumerate() {
        series.push(TimeSeries::new(*label, norm_t.clone(), norms.iter().map(|r| r[c]).collect())?);
    }
    Ok(NonlinearRun { series: SeriesSet { series }, reports, summary })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RichardsonReport {
    pub dts: Vec<f64>,
    /// `||U_{dt_j} - U_{dt_{j+1}}||` at `t_end`.
    pub differences: Vec<f64>,
    /// `log2` of successive difference ratios.
    pub orders: Vec<f64>,
}

impl RichardsonReport {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn spectral_distance(grid: &TorusGrid, a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>()).sum();
    (grid.spectral_weight() * s).sqrt()
}

/// Successive step halving from the same data, compared at `t_end`.
pub fn richardson(cfg: &NonlinearConfig, dts: &[f64]) -> Result<RichardsonReport> {
    let grid = cfg.grid()?;
    let mut finals = Vec::with_capacity(dts.len());
    for &dt in dts {
        let mut s = cfg.solver()?;
        s.advance_to(cfg.t_end, dt)?;
        finals.push(s.spectra());
    }
    let differences: Vec<f64> = finals.windows(2).map(|w| spectral_distance(&grid, &w[0], &w[1])).collect();
    let orders = differences.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(RichardsonReport { dts: dts.to_vec(), differences, orders })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OracleReport {
    /// Continuum `L^2` distance between one solver step and the exact linear evolution.
    pub error: f64,
    /// `||U(0)||` over all sixteen slots.
    pub norm: f64,
    pub amplitude: f64,
}

impl OracleReport {
    /// `amp^2 + 1e-12 ||U||`.
    pub fn bound(&self) -> f64 {
        self.amplitude * self.amplitude + 1e-12 * self.norm
    }

    pub fn passes(&self) -> bool {
        self.error <= self.bound()
    }
}

/// One step compared against the per-mode Green's functions acting on the same spectra.
pub fn linear_oracle(cfg: &NonlinearConfig) -> Result<OracleReport> {
    let grid = cfg.grid()?;
    let mut solver = cfg.solver()?;
    let before = solver.spectra();
    solver.step(cfg.dt)?;
    let after = solver.spectra();
    let t = cfg.dt;
    let mut want = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; SLOTS];
    for idx in 0..grid.len() {
        let k = grid.kvec_deriv(idx);
        if k == [0.0; 3] {
            // mean mode: the difference symbol reduces to relaxation plus the u-E coupling
            let m = propagator_matrix(k, t)?;
            let d1 = m.matvec(&(0..11).map(|j| before[j][idx]).collect::<Vec<_>>());
            for (s, v) in d1.iter().enumerate() {
                want[s][idx] = *v;
            }
            want[11][idx] = before[11][idx];
            for s in 12..16 {
                want[s][idx] = before[s][idx] * (-t).exp();
            }
            continue;
        }
        let kv = DiffWaveVector::new(k)?;
        let d0 = DiffModeState::from_slice(&(0..11).map(|j| before[j][idx]).collect::<Vec<_>>());
        let d1 = diff_mode_evolve(&kv, &d0, t)?.to_array();
        let kt = kv.ktilde();
        let u: [Complex64; 3] = std::array::from_fn(|j| before[12 + j][idx]);
        let ul: Complex64 = (0..3).map(|j| u[j] * kt[j]).sum();
        let perp = [0, 1, 2].map(|j| u[j] - ul * kt[j]);
        let [r, l, th] = sum_mode_evolve(WaveMag::new(kv.kmag())?, SumModeIC::new(before[11][idx], ul, before[15][idx]), t)?;
        let p = sum_perp_evolve(t, perp);
        for (s, v) in d1.iter().enumerate() {
            want[s][idx] = *v;
        }
        want[11][idx] = r;
        for j in 0..3 {
            want[12 + j][idx] = l * kt[j] + p[j];
        }
        want[15][idx] = th;
    }
    let zero = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; SLOTS];
    Ok(OracleReport {
        error: spectral_distance(&grid, &after, &want),
        norm: spectral_distance(&grid, &before, &zero),
        amplitude: cfg.amplitude,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_amplitude_gives_zero_series() {
        let cfg = NonlinearConfig { n: 8, amplitude: 0.0, t_end: 0.05, dt: 0.01, record_every: 2, ..Default::default() };
        let run = run_nonlinear(&cfg).unwrap();
        for s in &run.series.series {
            assert!(s.values.iter().all(|&v| v == 0.0), "{}", s.label);
        }
        assert_eq!(run.summary.steps, 5);
        assert_eq!(run.summary.max_rel_increase, 0.0);
    }

    #[test]
    fn short_run_decreases_energy() {
        let cfg = NonlinearConfig { n: 8, t_end: 0.5, dt: 0.01, record_every: 10, ..Default::default() };
        let run = run_nonlinear(&cfg).unwrap();
        assert!(run.summary.monotone(1e-8), "{:?}", run.summary);
        assert!(run.summary.gauss_drift < 1e-12);
        assert_eq!(run.series.get("E_s").unwrap().len(), 51);
        assert_eq!(run.series.get("B_L2").unwrap().len(), 6);
    }

    #[test]
    fn oracle_at_tiny_amplitude() {
        let cfg = NonlinearConfig { n: 8, amplitude: 1e-8, ..Default::default() };
        let r = linear_oracle(&cfg).unwrap();
        assert!(r.passes(), "{r:?} bound {}", r.bound());
    }
}
