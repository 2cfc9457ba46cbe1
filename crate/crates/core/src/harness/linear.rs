//! Whole-space decay experiments for the linearized sum and difference systems.

use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;

use super::fit::{fit_decay, DecayFit, DecayModel, TimeSeries};
use crate::dispersion::{log_grid, root_triple, WaveMag};
use crate::error::{Error, Result};
use crate::green::diff::{generator_matrix, B, E, RHO, THETA, U};
use crate::green::{sum_mode_evolve, SumModeIC};
use crate::linalg::{expm, CMatrix};
use crate::norms::{radial_norms, ChannelSpec, Polarization, QuadOptions, RadialProfile};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct LinearDecayConfig {
    /// Scalar radial amplitude used for every excited component.
    pub profile: RadialProfile,
    /// Power-law fit window and its log-spaced sample count.
    pub window: (f64, f64),
    pub samples: usize,
    /// Extra log-spaced samples on `[1, window.0)`.
    pub lead_samples: usize,
    /// Exponential fit window, sampled uniformly.
    pub exp_window: (f64, f64),
    pub exp_samples: usize,
    pub quad: QuadOptions,
}

impl Default for LinearDecayConfig {
    fn default() -> Self {
        Self {
            profile: RadialProfile::gaussian("gaussian", Polarization::Scalar),
            window: (50.0, 1000.0),
            samples: 60,
            lead_samples: 20,
            exp_window: (2.0, 20.0),
            exp_samples: 60,
            quad: QuadOptions::default(),
        }
    }
}

impl LinearDecayConfig {
    pub fn powerlaw_times(&self) -> Vec<f64> {
        let mut t = log_grid(1.0, self.window.0, self.lead_samples + 1);
        t.pop();
        t.extend(log_grid(self.window.0, self.window.1, self.samples));
        t
    }

    pub fn exponential_times(&self) -> Vec<f64> {
        let (lo, hi) = self.exp_window;
        let n = self.exp_samples.max(2);
        let lead = (0..n / 6).map(|i| lo * i as f64 / (n / 6) as f64);
        lead.chain((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)).collect()
    }
}

/// A set of labelled series from one experiment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeriesSet {
    pub series: Vec<TimeSeries>,
}

impl SeriesSet {
    pub fn get(&self, label: &str) -> Option<&TimeSeries> {
        self.series.iter().find(|s| s.label == label)
    }

    pub fn fit(&self, label: &str, window: (f64, f64), model: DecayModel) -> Result<DecayFit> {
        let s = self.get(label).ok_or_else(|| Error::Config { key: "channel".into(), msg: format!("no series `{label}`") })?;
        fit_decay(s, window, model)
    }

    pub fn extend(&mut self, other: SeriesSet) {
        self.series.extend(other.series);
    }
}

/// Evaluate `channels` at every time in parallel; the first failure wins.
fn sample(
    labels: &[&str],
    times: &[f64],
    kmax: f64,
    specs: &[ChannelSpec],
    quad: QuadOptions,
    amp: &(dyn Fn(f64, f64, &mut [Complex64]) -> Result<()> + Sync),
) -> Result<Vec<Vec<f64>>> {
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    let rows: Vec<Vec<f64>> = times
        .par_iter()
        .map(|&t| {
            let f = |k: f64, out: &mut [Complex64]| {
                if let Err(e) = amp(k, t, out) {
                    failure.lock().expect("poisoned").get_or_insert(e);
                    out.iter_mut().for_each(|z| *z = Complex64::new(f64::NAN, 0.0));
                }
            };
            radial_norms(kmax, specs, &f, quad)
        })
        .collect();
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    debug_assert_eq!(labels.len(), specs.len());
    Ok((0..specs.len()).map(|c| rows.iter().map(|r| r[c]).collect()).collect())
}

fn to_set(labels: &[&str], times: &[f64], cols: Vec<Vec<f64>>) -> Result<SeriesSet> {
    let series = labels.iter().zip(cols).map(|(l, v)| TimeSeries::new(*l, times.to_vec(), v)).collect::<Result<_>>()?;
    Ok(SeriesSet { series })
}

pub const SUM_CHANNELS: [&str; 9] = [
    "rho2_L2", "u2_L2", "theta2_L2", "grad_rho2_L2", "grad_u2_L2", "grad_theta2_L2", "rho2_L1hat", "u2_L1hat",
    "theta2_L1hat",
];

/// Sum system from `rho_2 = g`, `k~ . u_2 = i g`, `Theta_2 = g`, `u_perp = 0`.
pub fn run_linear_sum_decay(cfg: &LinearDecayConfig) -> Result<SeriesSet> {
    cfg.profile.check_tail(1)?;
    let (s, l) = (Polarization::Scalar, Polarization::Longitudinal);
    let specs = [
        ChannelSpec::l2(0, s),
        ChannelSpec::l2(0, l),
        ChannelSpec::l2(0, s),
        ChannelSpec::l2(1, s),
        ChannelSpec::l2(1, l),
        ChannelSpec::l2(1, s),
        ChannelSpec::l1hat(0, s),
        ChannelSpec::l1hat(0, l),
        ChannelSpec::l1hat(0, s),
    ];
    let profile = &cfg.profile;
    let amp = |k: f64, t: f64, out: &mut [Complex64]| -> Result<()> {
        let g = profile.amplitude(k);
        let [r, u, th] = sum_mode_evolve(WaveMag::new(k)?, SumModeIC::new(g, I * g, g), t)?;
        out.copy_from_slice(&[r, u, th, r, u, th, r, u, th]);
        Ok(())
    };
    let times = cfg.powerlaw_times();
    let cols = sample(&SUM_CHANNELS, &times, profile.kmax, &specs, cfg.quad, &amp)?;
    to_set(&SUM_CHANNELS, &times, cols)
}

/// `(u_1y, E_y, B_z)` for `k = |k| e_1`.
pub const TRANSVERSE_BLOCK: [usize; 3] = [U + 1, E + 1, B + 2];
/// `(rho_1, u_1x, Theta_1, E_x)` for `k = |k| e_1`.
pub const LONGITUDINAL_BLOCK: [usize; 4] = [RHO, U, THETA, E];

/// The difference symbol at `|k| e_1` restricted to an invariant block.
pub fn block_generator(kmag: f64, block: &[usize]) -> CMatrix {
    let m = generator_matrix([kmag, 0.0, 0.0]);
    CMatrix::from_fn(block.len(), |a, b| m[(block[a], block[b])])
}

pub fn block_propagator(kmag: f64, block: &[usize], t: f64) -> Result<CMatrix> {
    expm(&block_generator(kmag, block), t).map_err(|e| match e {
        Error::Expm { reason, t, .. } => Error::Expm { reason, kmag, t },
        other => other,
    })
}

pub const DIFF_TRANSVERSE_CHANNELS: [&str; 7] =
    ["u1_L2", "E_L2", "B_L2", "grad_B_L2", "B_L1hat", "E_L1hat", "u1_L1hat"];
pub const DIFF_DENSITY_CHANNELS: [&str; 3] = ["rho1_theta1_L2", "rho1_L2", "theta1_L2"];

/// Transverse data `u_1y = E_y = B_z = g` (and the rotated copy), then
/// density data `rho_1 = Theta_1 = g` with the longitudinal `E` fixed by the Gauss law.
pub fn run_linear_diff_decay(cfg: &LinearDecayConfig) -> Result<SeriesSet> {
    cfg.profile.check_tail(1)?;
    let profile = &cfg.profile;
    let tr = Polarization::Transverse;
    let specs = [
        ChannelSpec::l2(0, tr),
        ChannelSpec::l2(0, tr),
        ChannelSpec::l2(0, tr),
        ChannelSpec::l2(1, tr),
        ChannelSpec::l1hat(0, tr),
        ChannelSpec::l1hat(0, tr),
        ChannelSpec::l1hat(0, tr),
    ];
    let amp = |k: f64, t: f64, out: &mut [Complex64]| -> Result<()> {
        let g = profile.amplitude(k);
        let v = block_propagator(k, &TRANSVERSE_BLOCK, t)?.matvec(&[g, g, g]);
        out.copy_from_slice(&[v[0], v[1], v[2], v[2], v[2], v[1], v[0]]);
        Ok(())
    };
    let times = cfg.powerlaw_times();
    let cols = sample(&DIFF_TRANSVERSE_CHANNELS, &times, profile.kmax, &specs, cfg.quad, &amp)?;
    let mut set = to_set(&DIFF_TRANSVERSE_CHANNELS, &times, cols)?;

    let s = Polarization::Scalar;
    let specs = [ChannelSpec::l2(0, s), ChannelSpec::l2(0, s)];
    let amp = |k: f64, t: f64, out: &mut [Complex64]| -> Result<()> {
        let g = profile.amplitude(k);
        // (i/2) k E_x = -rho_1
        let ex = 2.0 * I * g / k;
        let v = block_propagator(k, &LONGITUDINAL_BLOCK, t)?.matvec(&[g, Complex64::new(0.0, 0.0), g, ex]);
        out[0] = v[0];
        out[1] = v[2];
        Ok(())
    };
    let times = cfg.exponential_times();
    let cols = sample(&DIFF_DENSITY_CHANNELS[1..], &times, profile.kmax, &specs, cfg.quad, &amp)?;
    let both: Vec<f64> = cols[0].iter().zip(&cols[1]).map(|(a, b)| a.hypot(*b)).collect();
    set.extend(to_set(&DIFF_DENSITY_CHANNELS, &times, vec![both, cols[0].clone(), cols[1].clone()])?);
    Ok(set)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSlope {
    pub kmag: f64,
    pub sigma: f64,
    pub fit: DecayFit,
}

impl ModeSlope {
    pub fn relative_error(&self) -> f64 {
        ((self.fit.slope - self.sigma) / self.sigma).abs()
    }
}

/// Exponential fit of `|rho_2(t, k)|` over `[t0, t0 + span/|sigma|]` for `rho_2(0) = 1`.
pub fn mode_log_slope(kmag: f64, t0: f64, span: f64, samples: usize) -> Result<ModeSlope> {
    let wm = WaveMag::new(kmag)?;
    let sigma = root_triple(wm)?.sigma;
    let t1 = t0 + span / sigma.abs();
    let times: Vec<f64> = (0..samples).map(|i| t0 + (t1 - t0) * i as f64 / (samples - 1).max(1) as f64).collect();
    let ic = SumModeIC::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let values = times.iter().map(|&t| sum_mode_evolve(wm, ic, t).map(|v| v[0].norm())).collect::<Result<Vec<_>>>()?;
    let s = TimeSeries::new(format!("rho2_mode_{kmag}"), times, values)?;
    let fit = fit_decay(&s, (t0, t1), DecayModel::Exponential)?;
    Ok(ModeSlope { kmag, sigma, fit })
}
