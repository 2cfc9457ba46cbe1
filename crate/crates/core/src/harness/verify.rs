//! Mode-level checks of the root structure, the Green's functions and the difference propagator.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fit::TimeSeries;
use super::linear::{mode_log_slope, ModeSlope, SeriesSet};
use crate::dispersion::{charpoly_eval, log_grid, root_triple, WaveMag};
use crate::error::Result;
use crate::green::sum::{channel_derivative, coefficients_with_roots};
use crate::green::{
    closed_form_agreement, diff_mode_evolve, gauss_longitudinal_e, sum_perp_evolve, DiffModeState, DiffWaveVector,
    SumModeIC,
};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RootStructure {
    pub samples: usize,
    pub sigma_in_range: bool,
    pub beta_in_range: bool,
    pub sigma_monotone: bool,
    /// `max |F(sigma)| / max(1, k^2)`.
    pub max_residual: f64,
    /// `|sigma / k^2 + 1|` at the smallest magnitude.
    pub small_k_error: f64,
    /// `|(sigma + 1/2) 16 k^2 - 1|` at the largest magnitude.
    pub large_k_error: f64,
}

impl RootStructure {
    pub fn passes(&self) -> bool {
        self.sigma_in_range
            && self.beta_in_range
            && self.sigma_monotone
            && self.max_residual < 1e-12
            && self.small_k_error < 0.02
            && self.large_k_error < 0.02
    }
}

/// Roots on a log grid; the series use the magnitude as the `t` column.
pub fn root_structure(k_lo: f64, k_hi: f64, samples: usize) -> Result<(RootStructure, SeriesSet)> {
    let ks = log_grid(k_lo, k_hi, samples);
    let roots = ks.iter().map(|&k| root_triple(WaveMag::new(k)?)).collect::<Result<Vec<_>>>()?;
    let mut rep = RootStructure {
        samples,
        sigma_in_range: roots.iter().all(|r| r.sigma > -0.5 && r.sigma < 0.0),
        beta_in_range: roots.iter().all(|r| r.beta > -1.0 && r.beta < -0.75),
        sigma_monotone: roots.windows(2).all(|w| w[1].sigma < w[0].sigma),
        max_residual: 0.0,
        small_k_error: f64::NAN,
        large_k_error: f64::NAN,
    };
    let mut residual = Vec::with_capacity(samples);
    for r in &roots {
        let wm = WaveMag::new(r.kmag)?;
        let f = charpoly_eval(wm, r.sigma).abs() / wm.squared().max(1.0);
        rep.max_residual = rep.max_residual.max(f);
        residual.push(f);
    }
    if let (Some(a), Some(b)) = (roots.first(), roots.last()) {
        rep.small_k_error = (a.sigma / (a.kmag * a.kmag) + 1.0).abs();
        rep.large_k_error = ((b.sigma + 0.5) * 16.0 * b.kmag * b.kmag - 1.0).abs();
    }
    let series = vec![
        TimeSeries::new("sigma", ks.clone(), roots.iter().map(|r| r.sigma).collect())?,
        TimeSeries::new("beta", ks.clone(), roots.iter().map(|r| r.beta).collect())?,
        TimeSeries::new("omega", ks.clone(), roots.iter().map(|r| r.omega).collect())?,
        TimeSeries::new("scaled_residual", ks, residual)?,
    ];
    Ok((rep, SeriesSet { series }))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CoefficientReport {
    pub samples: usize,
    /// Largest `|U(0) - U_0|` over the three channels.
    pub max_reconstruction: f64,
    /// Largest third-order ODE residual divided by `(1 + k^3) |ic|`.
    pub max_ode_residual: f64,
    /// Closed-form entries off by more than `1e-8` relative: `(kmag, channel, row, col)`.
    pub disagreements: Vec<(f64, String, usize, usize)>,
}

impl CoefficientReport {
    /// The closed-form comparison is informational and takes no part here.
    pub fn passes(&self) -> bool {
        self.max_reconstruction < 1e-13 && self.max_ode_residual < 1e-9
    }
}

fn random_c(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random `(kmag, ic, t)` triples with `kmag` log-uniform on `[1e-3, 1e3]` and `t` in `[0, 10]`.
pub fn coefficient_checks(samples: usize, seed: u64) -> Result<CoefficientReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut recon, mut ode) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let k = 10f64.powf(rng.gen_range(-3.0..3.0));
        let ic = SumModeIC::new(random_c(&mut rng), random_c(&mut rng), random_c(&mut rng));
        let t = rng.gen_range(0.0..10.0);
        let wm = WaveMag::new(k)?;
        let r = root_triple(wm)?;
        let c = coefficients_with_roots(&r, wm, ic)?;
        let (k2, norm) = (k * k, ic.norm());
        for (coef, init) in [(c.rho(), ic.rho0), (c.ulong(), ic.ulong0), (c.theta(), ic.theta0)] {
            recon = recon.max((channel_derivative(&r, coef, 0.0, 0) - init).norm());
            let d = [0, 1, 2, 3].map(|n| channel_derivative(&r, coef, t, n));
            let res = d[3] + 2.0 * d[2] + (1.0 + 2.0 * k2) * d[1] + k2 * d[0];
            ode = ode.max(res.norm() / ((1.0 + k * k2) * norm.max(1e-300)));
        }
    }
    let mut disagreements = Vec::new();
    for k in [0.1, 1.0, 10.0] {
        let ag = closed_form_agreement(WaveMag::new(k)?)?;
        for (ch, i, j) in ag.disagreements(1e-8) {
            disagreements.push((k, ch.to_string(), i, j));
        }
    }
    Ok(CoefficientReport { samples, max_reconstruction: recon, max_ode_residual: ode, disagreements })
}

/// Largest `| ||u_perp(t)|| / ||u_perp(0)|| - e^{-t} |` over random transverse vectors.
pub fn transverse_check(times: &[f64], modes: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..modes {
        let k = DiffWaveVector::new([rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)])?;
        let kt = k.ktilde();
        let raw = [0, 1, 2].map(|_| random_c(&mut rng));
        let p: Complex64 = (0..3).map(|j| raw[j] * kt[j]).sum();
        let u0 = [0, 1, 2].map(|j| raw[j] - p * kt[j]);
        let n = |v: &[Complex64; 3]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for &t in times {
            let u = sum_perp_evolve(t, u0);
            worst = worst.max((n(&u) / n(&u0) - (-t).exp()).abs());
        }
    }
    Ok(worst)
}

/// Long-time exponential fits of `|rho_2(t, k)|` against `sigma(k)`.
pub fn mode_slopes(kmags: &[f64]) -> Result<Vec<ModeSlope>> {
    kmags.iter().map(|&k| mode_log_slope(k, 40.0, 5.0, 40)).collect()
}

/// Random difference mode with the Gauss and divergence constraints built in.
pub fn random_constrained_mode(k: &DiffWaveVector, rng: &mut ChaCha8Rng) -> DiffModeState {
    let mut z = || random_c(rng);
    let rho1 = z();
    let u1 = [z(), z(), z()];
    let theta1 = z();
    let raw_e = [z(), z(), z()];
    let raw_b = [z(), z(), z()];
    let kt = k.ktilde();
    let proj = |v: [Complex64; 3]| {
        let p: Complex64 = (0..3).map(|j| v[j] * kt[j]).sum();
        [v[0] - p * kt[0], v[1] - p * kt[1], v[2] - p * kt[2]]
    };
    let el = gauss_longitudinal_e(k, rho1);
    let et = proj(raw_e);
    DiffModeState { rho1, u1, theta1, e: [el[0] + et[0], el[1] + et[1], el[2] + et[2]], b: proj(raw_b) }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ConservationReport {
    pub modes: usize,
    pub max_gauss: f64,
    pub max_div_b: f64,
}

impl ConservationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_gauss < tol && self.max_div_b < tol
    }
}

/// Constraint functionals along `diff_mode_evolve` at `times`.
pub fn propagator_conservation(modes: usize, times: &[f64], seed: u64) -> Result<ConservationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = ConservationReport { modes, max_gauss: 0.0, max_div_b: 0.0 };
    for _ in 0..modes {
        let kv = [0, 1, 2].map(|_| rng.gen_range(-3.0..3.0));
        let k = DiffWaveVector::new(kv)?;
        let s = random_constrained_mode(&k, &mut rng);
        for &t in times {
            let v = diff_mode_evolve(&k, &s, t)?;
            rep.max_gauss = rep.max_gauss.max(v.gauss_residual(&k).norm());
            rep.max_div_b = rep.max_div_b.max(v.div_b_residual(&k).norm());
        }
    }
    Ok(rep)
}
