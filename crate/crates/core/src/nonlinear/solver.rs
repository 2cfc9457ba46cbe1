//! Integrating-factor RK4 in the half-difference / half-sum variables.
//!
//! The linear part is propagated exactly per Fourier mode (the 11x11 difference
//! symbol and the 3x3 longitudinal sum propagator plus `e^{-t}` on `u_perp`);
//! the remainders are evaluated pseudo-spectrally.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::energy::{report_from_spectra, EnergyReport, EnergyWeights};
use super::state::TorusState;
use super::terms::{forward_many, inverse_many, terms_from_spectra, Spectra};
use crate::dispersion::WaveMag;
use crate::error::{Error, Result};
use crate::green::diff::propagator_matrix;
use crate::green::SumPropagator;
use crate::linalg::Mat3;
use crate::spectral::{Fft3, TorusGrid};

/// Slots per mode: the 11 difference fields, then `(rho_2, u_2, Theta_2)`.
pub const SLOTS: usize = 16;
const D: usize = 11;
const S_RHO: usize = 11;
const S_U: usize = 12;
const S_THETA: usize = 15;

type Mode = [Complex64; SLOTS];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Time steps are capped at `cfl / (N max(1, |u|_inf))`.
    pub cfl: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { cfl: 0.5 }
    }
}

#[derive(Clone)]
struct ModeProp {
    d: [Complex64; D * D],
    s: Mat3,
    decay: f64,
    kt: [f64; 3],
    kzero: bool,
}

impl ModeProp {
    fn new(k: [f64; 3], t: f64) -> Result<Self> {
        let dm = propagator_matrix(k, t)?;
        let mut d = [ZERO; D * D];
        d.copy_from_slice(dm.as_slice());
        let kmag = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        let decay = (-t).exp();
        if kmag == 0.0 {
            let one = Complex64::new(1.0, 0.0);
            let e = Complex64::new(decay, 0.0);
            let s = [[one, ZERO, ZERO], [ZERO, e, ZERO], [ZERO, ZERO, e]];
            return Ok(Self { d, s, decay, kt: [0.0; 3], kzero: true });
        }
        let s = SumPropagator::new(WaveMag::new(kmag)?)?.matrix(t);
        Ok(Self { d, s, decay, kt: k.map(|x| x / kmag), kzero: false })
    }

    fn apply(&self, v: &Mode) -> Mode {
        let mut out = [ZERO; SLOTS];
        for i in 0..D {
            let row = &self.d[i * D..(i + 1) * D];
            out[i] = row.iter().zip(&v[..D]).map(|(a, b)| a * b).sum();
        }
        let u = [v[S_U], v[S_U + 1], v[S_U + 2]];
        let (ul, perp) = if self.kzero {
            (ZERO, u)
        } else {
            let ul: Complex64 = (0..3).map(|j| u[j] * self.kt[j]).sum();
            (ul, [0, 1, 2].map(|j| u[j] - ul * self.kt[j]))
        };
        let x = [v[S_RHO], ul, v[S_THETA]];
        let y: [Complex64; 3] = std::array::from_fn(|i| (0..3).map(|j| self.s[i][j] * x[j]).sum());
        out[S_RHO] = y[0];
        out[S_THETA] = y[2];
        for j in 0..3 {
            out[S_U + j] = y[1] * self.kt[j] + perp[j] * self.decay;
        }
        out
    }
}

struct Props {
    dt: f64,
    half: Vec<ModeProp>,
    full: Vec<ModeProp>,
}

/// Pseudo-spectral solver holding the retained modes of the sum/difference state.
pub struct Solver {
    grid: TorusGrid,
    fft: Fft3,
    cfg: SolverConfig,
    time: f64,
    kept: Vec<usize>,
    neg: Vec<usize>,
    u: Vec<Mode>,
    cache: Vec<Arc<Props>>,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver").field("grid", &self.grid).field("time", &self.time).field("modes", &self.kept.len()).finish()
    }
}

fn axpy(a: &Mode, h: f64, b: &Mode) -> Mode {
    std::array::from_fn(|i| a[i] + b[i] * h)
}

impl Solver {
    pub fn new(state: &TorusState, cfg: SolverConfig) -> Result<Self> {
        state.check_dims()?;
        state.check_positivity()?;
        if !(cfg.cfl.is_finite() && cfg.cfl > 0.0) {
            return Err(Error::Config { key: "cfl".into(), msg: format!("must be positive, got {}", cfg.cfl) });
        }
        let grid = state.grid;
        let fft = Fft3::new(grid.n);
        let kept: Vec<usize> = (0..grid.len()).filter(|&i| !grid.dealias || grid.keep(i)).collect();
        let mut pos = vec![usize::MAX; grid.len()];
        for (p, &idx) in kept.iter().enumerate() {
            pos[idx] = p;
        }
        let neg = kept.iter().map(|&idx| pos[grid.neg_index(idx)]).collect();

        let sd = super::state::to_sum_diff(state);
        let fields: Vec<&[f64]> = sd.u1.iter().chain(&sd.u2).map(|v| v.as_slice()).collect();
        let spec = forward_many(&grid, &fft, &fields);
        let u = kept.iter().map(|&idx| std::array::from_fn(|s| spec[s][idx])).collect();
        let mut solver = Self { grid, fft, cfg, time: state.time, kept, neg, u, cache: Vec::new() };
        solver.symmetrize();
        Ok(solver)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// Full spectra of the sixteen slots (zero outside the retained set).
    pub fn spectra(&self) -> Vec<Vec<Complex64>> {
        let mut out = vec![vec![ZERO; self.grid.len()]; SLOTS];
        for (p, &idx) in self.kept.iter().enumerate() {
            for s in 0..SLOTS {
                out[s][idx] = self.u[p][s];
            }
        }
        out
    }

    fn species_spectra(&self, u: &[Mode]) -> Spectra {
        let n = self.grid.len();
        let z = || vec![ZERO; n];
        let mut sp = Spectra {
            rho: [z(), z()],
            u: [[z(), z(), z()], [z(), z(), z()]],
            theta: [z(), z()],
            e: [z(), z(), z()],
            b: [z(), z(), z()],
        };
        for (p, &idx) in self.kept.iter().enumerate() {
            let v = &u[p];
            sp.rho[0][idx] = v[0] + v[S_RHO];
            sp.rho[1][idx] = v[S_RHO] - v[0];
            sp.theta[0][idx] = v[4] + v[S_THETA];
            sp.theta[1][idx] = v[S_THETA] - v[4];
            for j in 0..3 {
                sp.u[0][j][idx] = v[1 + j] + v[S_U + j];
                sp.u[1][j][idx] = v[S_U + j] - v[1 + j];
                sp.e[j][idx] = v[5 + j];
                sp.b[j][idx] = v[8 + j];
            }
        }
        sp
    }

    pub fn state(&self) -> TorusState {
        let spec = self.spectra();
        let refs: Vec<&[Complex64]> = spec.iter().map(|v| v.as_slice()).collect();
        let phys = inverse_many(&self.fft, &refs);
        let sd = super::state::SumDiff { u1: phys[..D].to_vec(), u2: phys[D..].to_vec() };
        super::state::from_sum_diff(self.grid, self.time, &sd)
    }

    pub fn energy_report(&self, s: u32, weights: EnergyWeights) -> Result<EnergyReport> {
        let sp = self.species_spectra(&self.u);
        report_from_spectra(&self.grid, &self.fft, &sp, s, weights, self.time)
    }

    fn rhs(&self, u: &[Mode], time: f64) -> Result<Vec<Mode>> {
        let sp = self.species_spectra(u);
        let t = terms_from_spectra(&self.grid, &self.fft, &sp, time)?;
        let n = self.grid.len();
        let half = |a: &[f64], b: &[f64], sign: f64| -> Vec<f64> { (0..n).map(|x| 0.5 * (a[x] + sign * b[x])).collect() };
        let mut phys: Vec<Vec<f64>> = Vec::with_capacity(15);
        phys.push(half(&t.g1e, &t.g1i, -1.0));
        for j in 0..3 {
            phys.push(half(&t.g2e[j], &t.g2i[j], -1.0));
        }
        phys.push(half(&t.g3e, &t.g3i, -1.0));
        for j in 0..3 {
            phys.push((0..n).map(|x| t.g4e[j][x] - t.g4i[j][x]).collect());
        }
        phys.push(half(&t.g1e, &t.g1i, 1.0));
        for j in 0..3 {
            phys.push(half(&t.g2e[j], &t.g2i[j], 1.0));
        }
        phys.push(half(&t.g3e, &t.g3i, 1.0));
        let refs: Vec<&[f64]> = phys.iter().map(|v| v.as_slice()).collect();
        let spec = forward_many(&self.grid, &self.fft, &refs);
        // physical slot order: 8 difference fields without B, then 5 sum fields
        let slot_of = |k: usize| if k < 8 { k } else { k + 3 };
        Ok(self
            .kept
            .iter()
            .map(|&idx| {
                let mut m = [ZERO; SLOTS];
                for (k, f) in spec.iter().enumerate() {
                    m[slot_of(k)] = f[idx];
                }
                m
            })
            .collect())
    }

    fn props(&mut self, dt: f64) -> Result<Arc<Props>> {
        if let Some(p) = self.cache.iter().find(|p| p.dt == dt) {
            return Ok(p.clone());
        }
        let ks: Vec<[f64; 3]> = self.kept.iter().map(|&idx| self.grid.kvec_deriv(idx)).collect();
        let build = |t: f64| ks.par_iter().map(|&k| ModeProp::new(k, t)).collect::<Result<Vec<_>>>();
        let p = Arc::new(Props { dt, half: build(0.5 * dt)?, full: build(dt)? });
        if self.cache.len() >= 3 {
            self.cache.remove(0);
        }
        self.cache.push(p.clone());
        Ok(p)
    }

    fn max_speed(&self) -> f64 {
        let sp = self.species_spectra(&self.u);
        let refs: Vec<&[Complex64]> = sp.u.iter().flat_map(|v| v.iter().map(|f| f.as_slice())).collect();
        let phys = inverse_many(&self.fft, &refs);
        let n = self.grid.len();
        let mut m = 0.0f64;
        for s in 0..2 {
            for x in 0..n {
                let v = (0..3).map(|j| phys[3 * s + j][x].powi(2)).sum::<f64>().sqrt();
                m = m.max(v);
            }
        }
        m
    }

    fn symmetrize(&mut self) {
        let old = self.u.clone();
        for (p, m) in self.u.iter_mut().enumerate() {
            let q = &old[self.neg[p]];
            for s in 0..SLOTS {
                m[s] = 0.5 * (m[s] + q[s].conj());
            }
        }
    }

    fn ifrk4(&mut self, h: f64) -> Result<()> {
        let pr = self.props(h)?;
        let t0 = self.time;
        let u = std::mem::take(&mut self.u);
        let applied = |which: &[ModeProp], v: &[Mode]| -> Vec<Mode> {
            which.par_iter().zip(v.par_iter()).map(|(p, m)| p.apply(m)).collect()
        };
        let result = (|| -> Result<Vec<Mode>> {
            let a = self.rhs(&u, t0)?;
            let ua: Vec<Mode> = u.iter().zip(&a).map(|(x, y)| axpy(x, 0.5 * h, y)).collect();
            let u2 = applied(&pr.half, &ua);
            let b = self.rhs(&u2, t0 + 0.5 * h)?;
            let ehu = applied(&pr.half, &u);
            let u3: Vec<Mode> = ehu.iter().zip(&b).map(|(x, y)| axpy(x, 0.5 * h, y)).collect();
            let c = self.rhs(&u3, t0 + 0.5 * h)?;
            let eu = applied(&pr.full, &u);
            let ehc = applied(&pr.half, &c);
            let u4: Vec<Mode> = eu.iter().zip(&ehc).map(|(x, y)| axpy(x, h, y)).collect();
            let d = self.rhs(&u4, t0 + h)?;
            let ea = applied(&pr.full, &a);
            let bc: Vec<Mode> = b.iter().zip(&c).map(|(x, y)| axpy(x, 1.0, y)).collect();
            let ehbc = applied(&pr.half, &bc);
            Ok((0..u.len())
                .map(|p| std::array::from_fn(|s| eu[p][s] + (ea[p][s] + 2.0 * ehbc[p][s] + d[p][s]) * (h / 6.0)))
                .collect())
        })();
        match result {
            Ok(next) => {
                self.u = next;
                self.time = t0 + h;
                self.symmetrize();
                Ok(())
            }
            Err(e) => {
                self.u = u;
                Err(e)
            }
        }
    }

    /// One step of size `dt`, split into equal substeps when the CFL cap is exceeded.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidTimeStep(dt));
        }
        let cap = self.cfg.cfl / (self.grid.n as f64 * self.max_speed().max(1.0));
        if dt <= cap {
            return self.ifrk4(dt);
        }
        let m = (dt / cap).ceil() as usize;
        log::warn!("dt = {dt} exceeds the CFL cap {cap:.3e} at t = {}; taking {m} substeps", self.time);
        let h = dt / m as f64;
        for _ in 0..m {
            self.ifrk4(h)?;
        }
        Ok(())
    }

    /// Step with `dt` up to `t_end`, shortening the last step to land on it.
    pub fn advance_to(&mut self, t_end: f64, dt: f64) -> Result<()> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidTimeStep(dt));
        }
        let eps = 1e-12 * t_end.abs().max(1.0);
        while self.time < t_end - eps {
            let h = dt.min(t_end - self.time);
            self.step(h)?;
        }
        Ok(())
    }

    /// Steps needed to reach `t_end` from the current time with step `dt`.
    pub fn steps_to(&self, t_end: f64, dt: f64) -> usize {
        ((t_end - self.time) / dt - 1e-9).ceil().max(0.0) as usize
    }
}
