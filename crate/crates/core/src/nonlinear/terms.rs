//! Quadratic and higher remainders of the transformed system.
//!
//! ```text
//! g1 = -rho div u - u . grad rho
//! g2 = -(u . grad) u - ((1 + Theta)/(1 + rho) - 1) grad rho -+ u x B   (e: -, i: +)
//! g3 = -Theta div u - u . grad Theta
//! g4 = rho u
//! ```

use num_complex::Complex64;

use super::state::{check_positive, TorusState};
use crate::error::Result;
use crate::spectral::{apply_mask, spectral_derivative, Fft3, TorusGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearTerms {
    pub g1e: Vec<f64>,
    pub g2e: [Vec<f64>; 3],
    pub g3e: Vec<f64>,
    pub g4e: [Vec<f64>; 3],
    pub g1i: Vec<f64>,
    pub g2i: [Vec<f64>; 3],
    pub g3i: Vec<f64>,
    pub g4i: [Vec<f64>; 3],
}

impl NonlinearTerms {
    /// `(g1e, g2e, g3e, g4e, g1i, g2i, g3i, g4i)` flattened to 16 fields.
    pub fn fields(&self) -> [&[f64]; 16] {
        [
            &self.g1e, &self.g2e[0], &self.g2e[1], &self.g2e[2], &self.g3e, &self.g4e[0], &self.g4e[1], &self.g4e[2],
            &self.g1i, &self.g2i[0], &self.g2i[1], &self.g2i[2], &self.g3i, &self.g4i[0], &self.g4i[1], &self.g4i[2],
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.fields().iter().flat_map(|f| f.iter()).fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Species spectra, index 0 for electrons and 1 for ions.
#[derive(Debug, Clone)]
pub(crate) struct Spectra {
    pub rho: [Vec<Complex64>; 2],
    pub u: [[Vec<Complex64>; 3]; 2],
    pub theta: [Vec<Complex64>; 2],
    pub e: [Vec<Complex64>; 3],
    pub b: [Vec<Complex64>; 3],
}

impl Spectra {
    pub fn from_state(fft: &Fft3, s: &TorusState) -> Self {
        let f = |x: &[f64]| fft.forward_real(x);
        let v3 = |x: &[Vec<f64>; 3]| [f(&x[0]), f(&x[1]), f(&x[2])];
        Self {
            rho: [f(&s.rho_e), f(&s.rho_i)],
            u: [v3(&s.u_e), v3(&s.u_i)],
            theta: [f(&s.theta_e), f(&s.theta_i)],
            e: v3(&s.e),
            b: v3(&s.b),
        }
    }

    pub fn mask(&mut self, grid: &TorusGrid) {
        for f in self.all_mut() {
            apply_mask(grid, f);
        }
    }

    fn all_mut(&mut self) -> Vec<&mut Vec<Complex64>> {
        let mut out: Vec<&mut Vec<Complex64>> = Vec::with_capacity(16);
        let [r0, r1] = &mut self.rho;
        out.push(r0);
        out.push(r1);
        for sp in self.u.iter_mut() {
            out.extend(sp.iter_mut());
        }
        let [t0, t1] = &mut self.theta;
        out.push(t0);
        out.push(t1);
        out.extend(self.e.iter_mut());
        out.extend(self.b.iter_mut());
        out
    }
}

/// Inverse transforms of many Hermitian spectra, two per complex FFT.
pub(crate) fn inverse_many(fft: &Fft3, specs: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(specs.len());
    let mut it = specs.chunks(2);
    for pair in &mut it {
        if pair.len() == 2 {
            let (a, b) = fft.inverse_real_pair(pair[0], pair[1]);
            out.push(a);
            out.push(b);
        } else {
            out.push(fft.inverse_real(pair[0]));
        }
    }
    out
}

/// Forward transforms of many real fields, two per complex FFT.
pub(crate) fn forward_many(grid: &TorusGrid, fft: &Fft3, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        if pair.len() == 2 {
            let (a, b) = fft.forward_real_pair(grid, pair[0], pair[1]);
            out.push(a);
            out.push(b);
        } else {
            out.push(fft.forward_real(pair[0]));
        }
    }
    out
}

const PER_SPECIES: usize = 20;

/// Physical-space products from (already masked) species spectra.
pub(crate) fn terms_from_spectra(grid: &TorusGrid, fft: &Fft3, sp: &Spectra, time: f64) -> Result<NonlinearTerms> {
    let mut owned: Vec<Vec<Complex64>> = Vec::with_capacity(2 * PER_SPECIES - 10);
    for m in 0..2 {
        for j in 0..3 {
            owned.push(spectral_derivative(grid, &sp.rho[m], j));
        }
        for j in 0..3 {
            owned.push(spectral_derivative(grid, &sp.theta[m], j));
        }
        for l in 0..3 {
            for j in 0..3 {
                owned.push(spectral_derivative(grid, &sp.u[m][l], j));
            }
        }
    }
    let mut specs: Vec<&[Complex64]> = Vec::with_capacity(2 * PER_SPECIES + 3);
    for m in 0..2 {
        specs.push(&sp.rho[m]);
        specs.push(&sp.theta[m]);
        specs.extend(sp.u[m].iter().map(|v| v.as_slice()));
        specs.extend(owned[m * 15..(m + 1) * 15].iter().map(|v| v.as_slice()));
    }
    specs.extend(sp.b.iter().map(|v| v.as_slice()));
    let phys = inverse_many(fft, &specs);

    let n = grid.len();
    let species = |m: usize| &phys[m * PER_SPECIES..(m + 1) * PER_SPECIES];
    let b = &phys[2 * PER_SPECIES..2 * PER_SPECIES + 3];
    {
        let (e, i) = (species(0), species(1));
        check_positive(grid, &[("rho_e", &e[0]), ("theta_e", &e[1]), ("rho_i", &i[0]), ("theta_i", &i[1])], time)?;
    }

    let mut out: [(Vec<f64>, [Vec<f64>; 3], Vec<f64>, [Vec<f64>; 3]); 2] = std::array::from_fn(|_| {
        (vec![0.0; n], [vec![0.0; n], vec![0.0; n], vec![0.0; n]], vec![0.0; n], [vec![0.0; n], vec![0.0; n], vec![0.0; n]])
    });
    for m in 0..2 {
        let f = species(m);
        let (rho, theta, u) = (&f[0], &f[1], [&f[2], &f[3], &f[4]]);
        let grad_rho = [&f[5], &f[6], &f[7]];
        let grad_theta = [&f[8], &f[9], &f[10]];
        // du[l][j] = d_j u_l
        let du = |l: usize, j: usize| &f[11 + 3 * l + j];
        let lorentz = if m == 0 { -1.0 } else { 1.0 };
        let (g1, g2, g3, g4) = &mut out[m];
        for x in 0..n {
            let uu = [u[0][x], u[1][x], u[2][x]];
            let div = du(0, 0)[x] + du(1, 1)[x] + du(2, 2)[x];
            let ugr = uu[0] * grad_rho[0][x] + uu[1] * grad_rho[1][x] + uu[2] * grad_rho[2][x];
            let ugt = uu[0] * grad_theta[0][x] + uu[1] * grad_theta[1][x] + uu[2] * grad_theta[2][x];
            g1[x] = -rho[x] * div - ugr;
            g3[x] = -theta[x] * div - ugt;
            let press = (1.0 + theta[x]) / (1.0 + rho[x]) - 1.0;
            let bb = [b[0][x], b[1][x], b[2][x]];
            let uxb = [uu[1] * bb[2] - uu[2] * bb[1], uu[2] * bb[0] - uu[0] * bb[2], uu[0] * bb[1] - uu[1] * bb[0]];
            for l in 0..3 {
                let adv = uu[0] * du(l, 0)[x] + uu[1] * du(l, 1)[x] + uu[2] * du(l, 2)[x];
                g2[l][x] = -adv - press * grad_rho[l][x] + lorentz * uxb[l];
                g4[l][x] = rho[x] * uu[l];
            }
        }
    }
    let [(g1e, g2e, g3e, g4e), (g1i, g2i, g3i, g4i)] = out;
    Ok(NonlinearTerms { g1e, g2e, g3e, g4e, g1i, g2i, g3i, g4i })
}

/// All eight remainders of a physical state, dealiased when the grid asks for it.
pub fn nonlinear_terms(state: &TorusState) -> Result<NonlinearTerms> {
    state.check_dims()?;
    state.check_positivity()?;
    let grid = state.grid;
    let fft = Fft3::new(grid.n);
    let mut sp = Spectra::from_state(&fft, state);
    sp.mask(&grid);
    let mut t = terms_from_spectra(&grid, &fft, &sp, state.time)?;
    if grid.dealias {
        let filter = |f: &mut Vec<f64>| {
            let mut h = fft.forward_real(f);
            apply_mask(&grid, &mut h);
            *f = fft.inverse_real(&h);
        };
        for f in [&mut t.g1e, &mut t.g3e, &mut t.g1i, &mut t.g3i] {
            filter(f);
        }
        for v in [&mut t.g2e, &mut t.g4e, &mut t.g2i, &mut t.g4i] {
            v.iter_mut().for_each(filter);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn zero_state() {
        let g = TorusGrid::new(8, 1.0, true).unwrap();
        let t = nonlinear_terms(&TorusState::zeros(g)).unwrap();
        assert_eq!(t.max_abs(), 0.0);
    }

    #[test]
    fn constant_state() {
        let g = TorusGrid::new(8, 1.0, true).unwrap();
        let mut s = TorusState::zeros(g);
        s.rho_e.iter_mut().for_each(|x| *x = 0.2);
        s.u_e[0].iter_mut().for_each(|x| *x = -0.3);
        s.theta_e.iter_mut().for_each(|x| *x = 0.1);
        let t = nonlinear_terms(&s).unwrap();
        for x in 0..g.len() {
            assert!(t.g1e[x].abs() < 1e-15 && t.g3e[x].abs() < 1e-15);
            for l in 0..3 {
                assert!(t.g2e[l][x].abs() < 1e-15);
            }
            assert!((t.g4e[0][x] + 0.06).abs() < 1e-15);
        }
    }

    #[test]
    fn single_mode_continuity() {
        let g = TorusGrid::new(16, 1.0, true).unwrap();
        let (a, b) = (0.1, 0.2);
        let mut s = TorusState::zeros(g);
        for idx in 0..g.len() {
            let x = g.position(idx)[0];
            s.rho_e[idx] = a * x.sin();
            s.u_e[0][idx] = b * x.sin();
        }
        let t = nonlinear_terms(&s).unwrap();
        for idx in 0..g.len() {
            let x = g.position(idx)[0];
            assert!((t.g1e[idx] + a * b * (2.0 * x).sin()).abs() < 1e-12);
            assert!((t.g4e[0][idx] - a * b * x.sin() * x.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn lorentz_sign() {
        let g = TorusGrid::new(8, 1.0, false).unwrap();
        let mut s = TorusState::zeros(g);
        s.u_e[0].iter_mut().for_each(|x| *x = 1.0);
        s.u_i[0].iter_mut().for_each(|x| *x = 1.0);
        s.b[2].iter_mut().for_each(|x| *x = 1.0);
        let t = nonlinear_terms(&s).unwrap();
        // u x B = x x z = -y
        assert!((t.g2e[1][0] - 1.0).abs() < 1e-15);
        assert!((t.g2i[1][0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn vacuum_aborts() {
        let g = TorusGrid::new(8, 1.0, false).unwrap();
        let mut s = TorusState::zeros(g);
        s.rho_i[5] = -1.0;
        assert!(matches!(nonlinear_terms(&s), Err(Error::Positivity { field: "rho_i", .. })));
    }
}
