//! `key = value` run configuration with flag overrides.

use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::{DecayModel, LinearDecayConfig, NonlinearConfig};
use crate::nonlinear::EnergyWeights;
use crate::norms::{Polarization, RadialProfile, DEFAULT_KMAX};
use crate::spectral::TorusGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Roots,
    GreenVerify,
    LinearDecay,
    Nonlinear,
    Fit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Gaussian,
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub n: usize,
    pub l: f64,
    pub dealias: bool,
    pub s: u32,
    pub amplitude: f64,
    pub t_end: f64,
    pub dt: f64,
    pub weights: EnergyWeights,
    pub seed: u64,
    pub kcut: usize,
    pub cfl: f64,
    pub record_every: usize,
    pub profile: ProfileKind,
    pub kmax: f64,
    /// Magnitude range and count for `roots`.
    pub k_lo: f64,
    pub k_hi: f64,
    pub samples: usize,
    /// Fit window.
    pub t_lo: f64,
    pub t_hi: f64,
    pub model: DecayModel,
    pub channel: Option<String>,
    /// Optional slope check for `fit`.
    pub target: Option<f64>,
    pub tol: f64,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

/// Every key accepted in a config file or as `--key value`.
pub const KEYS: [&str; 27] = [
    "n", "l", "dealias", "s", "amplitude", "t_end", "dt", "k1", "k2", "k3", "seed", "kcut", "cfl", "record_every",
    "profile", "kmax", "k_lo", "k_hi", "samples", "t_lo", "t_hi", "model", "channel", "target", "tol", "input", "out",
];

impl RunConfig {
    pub fn defaults(subcommand: Subcommand) -> Self {
        let nl = NonlinearConfig::default();
        let (samples, t_lo, t_hi) = match subcommand {
            Subcommand::Roots => (200, 50.0, 1000.0),
            _ => (60, 50.0, 1000.0),
        };
        Self {
            subcommand,
            n: nl.n,
            l: nl.l,
            dealias: nl.dealias,
            s: nl.s,
            amplitude: nl.amplitude,
            t_end: nl.t_end,
            dt: nl.dt,
            weights: nl.weights,
            seed: nl.seed,
            kcut: nl.kcut,
            cfl: nl.cfl,
            record_every: nl.record_every,
            profile: ProfileKind::Gaussian,
            kmax: DEFAULT_KMAX,
            k_lo: 1e-3,
            k_hi: 1e3,
            samples,
            t_lo,
            t_hi,
            model: DecayModel::Powerlaw,
            channel: None,
            target: None,
            tol: 0.05,
            input: None,
            out: None,
        }
    }

    pub fn nonlinear(&self) -> NonlinearConfig {
        NonlinearConfig {
            n: self.n,
            l: self.l,
            dealias: self.dealias,
            s: self.s,
            amplitude: self.amplitude,
            seed: self.seed,
            kcut: self.kcut,
            t_end: self.t_end,
            dt: self.dt,
            weights: self.weights,
            cfl: self.cfl,
            record_every: self.record_every,
        }
    }

    pub fn linear(&self) -> Result<LinearDecayConfig> {
        let profile = match self.profile {
            ProfileKind::Gaussian => RadialProfile::new(
                "gaussian",
                |k| num_complex::Complex64::new((-k * k).exp(), 0.0),
                Polarization::Scalar,
                self.kmax,
                crate::norms::DecayHint::Gaussian,
            )?,
            ProfileKind::Exponential => RadialProfile::exponential("exponential", Polarization::Scalar, self.kmax)?,
        };
        Ok(LinearDecayConfig { profile, window: (self.t_lo, self.t_hi), samples: self.samples, ..Default::default() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Config { key: key.into(), msg: format!("malformed value `{v}`") })
        }
        let v = value.trim();
        match key {
            "n" => self.n = num(key, v)?,
            "l" => self.l = num(key, v)?,
            "dealias" => self.dealias = num(key, v)?,
            "s" => self.s = num(key, v)?,
            "amplitude" => self.amplitude = num(key, v)?,
            "t_end" => self.t_end = num(key, v)?,
            "dt" => self.dt = num(key, v)?,
            "k1" => self.weights.k1 = num(key, v)?,
            "k2" => self.weights.k2 = num(key, v)?,
            "k3" => self.weights.k3 = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "kcut" => self.kcut = num(key, v)?,
            "cfl" => self.cfl = num(key, v)?,
            "record_every" => self.record_every = num(key, v)?,
            "profile" => {
                self.profile = match v {
                    "gaussian" => ProfileKind::Gaussian,
                    "exponential" => ProfileKind::Exponential,
                    _ => return Err(Error::Config { key: key.into(), msg: format!("expected gaussian or exponential, got `{v}`") }),
                }
            }
            "kmax" => self.kmax = num(key, v)?,
            "k_lo" => self.k_lo = num(key, v)?,
            "k_hi" => self.k_hi = num(key, v)?,
            "samples" => self.samples = num(key, v)?,
            "t_lo" => self.t_lo = num(key, v)?,
            "t_hi" => self.t_hi = num(key, v)?,
            "model" => self.model = v.parse()?,
            "channel" => self.channel = Some(v.to_string()),
            "target" => self.target = Some(num(key, v)?),
            "tol" => self.tol = num(key, v)?,
            "input" => self.input = Some(PathBuf::from(v)),
            "out" => self.out = Some(PathBuf::from(v)),
            _ => return Err(Error::Config { key: key.into(), msg: "unknown key".into() }),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::Config { key: key.into(), msg });
        if let Err(Error::InvalidGrid(msg)) = TorusGrid::new(self.n, self.l, self.dealias) {
            return bad(if self.n < 8 || !self.n.is_power_of_two() { "n" } else { "l" }, msg);
        }
        if self.s < 1 {
            return bad("s", "must be at least 1".into());
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return bad("amplitude", format!("must be nonnegative, got {}", self.amplitude));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad("t_end", format!("must be positive, got {}", self.t_end));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt", format!("must be positive, got {}", self.dt));
        }
        let w = self.weights;
        if EnergyWeights::new(w.k1, w.k2, w.k3).is_err() {
            return bad("weights", format!("need 0 < k3 < k2 < k1 < 1 and k2^1.5 < k3, got ({}, {}, {})", w.k1, w.k2, w.k3));
        }
        if self.kcut == 0 || 3 * self.kcut >= self.n {
            return bad("kcut", format!("must lie in 1..n/3, got {}", self.kcut));
        }
        if !(self.cfl.is_finite() && self.cfl > 0.0) {
            return bad("cfl", format!("must be positive, got {}", self.cfl));
        }
        if !(self.kmax.is_finite() && self.kmax > 0.0) {
            return bad("kmax", format!("must be positive, got {}", self.kmax));
        }
        if !(self.k_lo > 0.0 && self.k_hi > self.k_lo && self.k_hi.is_finite()) {
            return bad("k_lo", format!("need 0 < k_lo < k_hi, got [{}, {}]", self.k_lo, self.k_hi));
        }
        if self.samples < 2 {
            return bad("samples", "need at least 2".into());
        }
        if !(self.t_lo >= 0.0 && self.t_hi > self.t_lo && self.t_hi.is_finite()) {
            return bad("t_lo", format!("need 0 <= t_lo < t_hi, got [{}, {}]", self.t_lo, self.t_hi));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad("tol", format!("must be positive, got {}", self.tol));
        }
        if self.subcommand == Subcommand::Fit {
            if self.input.is_none() {
                return bad("input", "fit needs an input CSV".into());
            }
            if self.channel.is_none() {
                return bad("channel", "fit needs a channel name".into());
            }
        }
        Ok(())
    }
}

/// Defaults, then the `key = value` lines of `file`, then `flags` in order.
pub fn parse_config(subcommand: Subcommand, file: Option<&str>, flags: &[(String, String)]) -> Result<RunConfig> {
    let mut cfg = RunConfig::defaults(subcommand);
    if let Some(text) = file {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                key: line.to_string(),
                msg: format!("line {}: expected `key = value`", lineno + 1),
            })?;
            cfg.set(key.trim(), value)?;
        }
    }
    for (key, value) in flags {
        cfg.set(&key.replace('-', "_"), value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}
