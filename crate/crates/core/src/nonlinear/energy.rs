//! Energy functionals, dissipation rates and their high-order analogues.
//!
//! `E_s` is the symmetrized leading part
//!
//! ```text
//! sum_{|a|<=s} sum_mu <(1+Theta)/(1+rho) |d^a rho|^2> + <(1+rho) |d^a u|^2> + <(1+rho)/(1+Theta) |d^a Theta|^2>
//!            + ||d^a E||^2 + ||d^a B||^2
//! ```
//!
//! plus `K1 sum_mu <d^a u_mu, grad d^a rho_mu>` and `K2 <d^a (u_e - u_i), d^a E>` over
//! `|a| <= s-1`, and `K3 <d^a E, -curl d^a B>` over `|a| <= s-2`. The high-order
//! versions keep only `|a| >= 1` in every sum.

use num_complex::Complex64;

use super::state::{check_positive, constraint_residual_spectral, TorusState};
use super::terms::{inverse_many, Spectra};
use crate::error::{Error, Result};
use crate::spectral::{multi_indices, partial_symbol, sobolev_multiplier, Fft3, TorusGrid};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnergyWeights {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl EnergyWeights {
    /// Requires `0 < K3 < K2 < K1 < 1` and `K2^{3/2} < K3`.
    pub fn new(k1: f64, k2: f64, k3: f64) -> Result<Self> {
        let ok = 0.0 < k3 && k3 < k2 && k2 < k1 && k1 < 1.0 && k2.powf(1.5) < k3;
        if ok {
            Ok(Self { k1, k2, k3 })
        } else {
            Err(Error::InvalidWeights { k1, k2, k3 })
        }
    }
}

impl Default for EnergyWeights {
    fn default() -> Self {
        Self { k1: 0.1, k2: 0.01, k3: 0.005 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnergyReport {
    pub time: f64,
    pub s: u32,
    pub e_s: f64,
    pub d_s: f64,
    pub e_s_h: f64,
    pub d_s_h: f64,
    /// `||div E - rho_i + rho_e||`.
    pub gauss_residual: f64,
    /// `||div B||`.
    pub div_b_residual: f64,
    /// `||U||_s^2` over all sixteen fields, for the equivalence ratio.
    pub norm_s_sq: f64,
    pub weights: EnergyWeights,
}

impl EnergyReport {
    pub fn equivalence_ratio(&self) -> f64 {
        if self.norm_s_sq > 0.0 {
            self.e_s / self.norm_s_sq
        } else {
            1.0
        }
    }
}

fn high(m: f64, r: i32) -> f64 {
    if r < 0 {
        0.0
    } else {
        (m - 1.0).max(0.0)
    }
}

pub(crate) fn report_from_spectra(
    grid: &TorusGrid,
    fft: &Fft3,
    sp: &Spectra,
    s: u32,
    weights: EnergyWeights,
    time: f64,
) -> Result<EnergyReport> {
    if s < 1 {
        return Err(Error::Config { key: "s".into(), msg: "energy functionals need s >= 1".into() });
    }
    let si = s as i32;
    let n = grid.len();
    let cell = grid.dx().powi(3);
    let sw = grid.spectral_weight();

    // weights of the leading part, per species
    let base = inverse_many(fft, &[&sp.rho[0], &sp.theta[0], &sp.rho[1], &sp.theta[1]]);
    check_positive(grid, &[("rho_e", &base[0]), ("theta_e", &base[1]), ("rho_i", &base[2]), ("theta_i", &base[3])], time)?;
    let mut w: Vec<[Vec<f64>; 3]> = Vec::with_capacity(2);
    for m in 0..2 {
        let (r, t) = (&base[2 * m], &base[2 * m + 1]);
        let wr: Vec<f64> = (0..n).map(|x| (1.0 + t[x]) / (1.0 + r[x])).collect();
        let wu: Vec<f64> = (0..n).map(|x| 1.0 + r[x]).collect();
        let wt: Vec<f64> = (0..n).map(|x| (1.0 + r[x]) / (1.0 + t[x])).collect();
        w.push([wr, wu, wt]);
    }

    // each alpha: five complex transforms, two real fields per transform
    let pairs: [(&[Complex64], &[Complex64], &[f64], &[f64]); 5] = [
        (&sp.rho[0], &sp.theta[0], &w[0][0], &w[0][2]),
        (&sp.rho[1], &sp.theta[1], &w[1][0], &w[1][2]),
        (&sp.u[0][0], &sp.u[0][1], &w[0][1], &w[0][1]),
        (&sp.u[1][0], &sp.u[1][1], &w[1][1], &w[1][1]),
        (&sp.u[0][2], &sp.u[1][2], &w[0][1], &w[1][1]),
    ];
    let scale = 1.0 / (n as f64 * n as f64);
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let (mut lead, mut lead_h) = (0.0, 0.0);
    for alpha in multi_indices(0, s as usize) {
        let sym = partial_symbol(grid, alpha);
        let mut acc = 0.0;
        for (f, g, wa, wb) in pairs {
            for x in 0..n {
                let (fa, ga) = (f[x] * sym[x], g[x] * sym[x]);
                z[x] = Complex64::new(fa.re - ga.im, fa.im + ga.re);
            }
            fft.inverse_unscaled(&mut z);
            acc += z.iter().zip(wa).zip(wb).map(|((v, p), q)| p * v.re * v.re + q * v.im * v.im).sum::<f64>();
        }
        acc *= cell * scale;
        lead += acc;
        if alpha.iter().sum::<usize>() >= 1 {
            lead_h += acc;
        }
    }

    let i = Complex64::new(0.0, 1.0);
    let (mut maxwell, mut maxwell_h) = (0.0, 0.0);
    let (mut c1, mut c1h, mut c2, mut c2h, mut c3, mut c3h) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut d, mut dh) = (0.0, 0.0);
    let mut norm_sq = 0.0;
    let n3 = |v: &[Vec<Complex64>; 3], idx: usize| v[0][idx].norm_sqr() + v[1][idx].norm_sqr() + v[2][idx].norm_sqr();
    for idx in 0..n {
        let kt = grid.kvec(idx);
        let kd = grid.kvec_deriv(idx);
        let k2 = kt[0] * kt[0] + kt[1] * kt[1] + kt[2] * kt[2];
        let ms = sobolev_multiplier(kt, si);
        let ms1 = sobolev_multiplier(kt, si - 1);
        let ms2 = sobolev_multiplier(kt, si - 2);
        let ms3 = sobolev_multiplier(kt, si - 3);

        let e2 = n3(&sp.e, idx);
        let b2 = n3(&sp.b, idx);
        maxwell += ms * (e2 + b2);
        maxwell_h += high(ms, si) * (e2 + b2);

        let mut fluid_l2 = 0.0;
        for m in 0..2 {
            let r = sp.rho[m][idx];
            let t = sp.theta[m][idx];
            let u2 = n3(&sp.u[m], idx);
            fluid_l2 += r.norm_sqr() + u2 + t.norm_sqr();
            // K1: Re(u . conj(i k rho))
            let ikr = [0, 1, 2].map(|j| i * kd[j] * r);
            let x: f64 = (0..3).map(|j| (sp.u[m][j][idx] * ikr[j].conj()).re).sum();
            c1 += ms1 * x;
            c1h += high(ms1, si - 1) * x;
            d += k2 * ms1 * r.norm_sqr() + ms * (u2 + t.norm_sqr());
            dh += k2 * k2 * ms2 * r.norm_sqr() + k2 * ms1 * (u2 + t.norm_sqr());
        }
        norm_sq += ms * (fluid_l2 + e2 + b2);

        let du = [0, 1, 2].map(|j| sp.u[0][j][idx] - sp.u[1][j][idx]);
        let x: f64 = (0..3).map(|j| (du[j] * sp.e[j][idx].conj()).re).sum();
        c2 += ms1 * x;
        c2h += high(ms1, si - 1) * x;

        // -i k x B
        let b = [sp.b[0][idx], sp.b[1][idx], sp.b[2][idx]];
        let kxb = [kd[1] * b[2] - kd[2] * b[1], kd[2] * b[0] - kd[0] * b[2], kd[0] * b[1] - kd[1] * b[0]];
        let x: f64 = (0..3).map(|j| (sp.e[j][idx] * (-i * kxb[j]).conj()).re).sum();
        c3 += ms2 * x;
        c3h += high(ms2, si - 2) * x;

        let dr = (sp.rho[0][idx] - sp.rho[1][idx]).norm_sqr();
        d += ms1 * e2 + k2 * ms2 * b2 + dr;
        dh += k2 * ms2 * e2 + k2 * k2 * ms3 * b2 + k2 * dr;
    }
    let EnergyWeights { k1, k2, k3 } = weights;
    let e_s = lead + sw * (maxwell + k1 * c1 + k2 * c2 + k3 * c3);
    let e_s_h = lead_h + sw * (maxwell_h + k1 * c1h + k2 * c2h + k3 * c3h);
    let rho1: Vec<Complex64> = (0..n).map(|x| 0.5 * (sp.rho[0][x] - sp.rho[1][x])).collect();
    let (gauss, divb) = constraint_residual_spectral(grid, &rho1, &sp.e, &sp.b);
    Ok(EnergyReport {
        time,
        s,
        e_s,
        d_s: sw * d,
        e_s_h,
        d_s_h: sw * dh,
        gauss_residual: gauss,
        div_b_residual: divb,
        norm_s_sq: sw * norm_sq,
        weights,
    })
}

pub fn energy_report(state: &TorusState, s: u32, weights: EnergyWeights) -> Result<EnergyReport> {
    state.check_dims()?;
    state.check_positivity()?;
    let fft = Fft3::new(state.grid.n);
    let sp = Spectra::from_state(&fft, state);
    report_from_spectra(&state.grid, &fft, &sp, s, weights, state.time)
}
