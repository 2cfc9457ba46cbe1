//! Per-mode propagator of the linearized difference system.
//!
//! State ordering is `(rho_1, u_1x, u_1y, u_1z, Theta_1, E_x, E_y, E_z, B_x, B_y, B_z)`.
//! The Fourier symbol is
//!
//! ```text
//! d/dt rho   = -i k . u
//! d/dt u     = -i k rho - i k Theta - E - u
//! d/dt Theta = -i k . u - Theta
//! d/dt E     =  i k x B + 2 u
//! d/dt B     = -i k x E
//! ```
//!
//! and `(i/2) k . E + rho`, `k . B` are conserved by it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{expm, CMatrix};

pub const DIM: usize = 11;
pub const RHO: usize = 0;
pub const U: usize = 1;
pub const THETA: usize = 4;
pub const E: usize = 5;
pub const B: usize = 8;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Nonzero wave vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffWaveVector {
    k: [f64; 3],
    kmag: f64,
}

impl DiffWaveVector {
    pub fn new(k: [f64; 3]) -> Result<Self> {
        let kmag = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        if kmag > 0.0 && kmag.is_finite() {
            Ok(Self { k, kmag })
        } else {
            Err(Error::ZeroWaveVector(k))
        }
    }

    /// `|k| e_1`.
    pub fn along_x(kmag: f64) -> Result<Self> {
        Self::new([kmag, 0.0, 0.0])
    }

    pub fn k(&self) -> [f64; 3] {
        self.k
    }

    pub fn kmag(&self) -> f64 {
        self.kmag
    }

    pub fn ktilde(&self) -> [f64; 3] {
        self.k.map(|x| x / self.kmag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiffModeState {
    pub rho1: Complex64,
    pub u1: [Complex64; 3],
    pub theta1: Complex64,
    pub e: [Complex64; 3],
    pub b: [Complex64; 3],
}

impl DiffModeState {
    pub fn to_array(&self) -> [Complex64; DIM] {
        let mut v = [ZERO; DIM];
        v[RHO] = self.rho1;
        v[U..U + 3].copy_from_slice(&self.u1);
        v[THETA] = self.theta1;
        v[E..E + 3].copy_from_slice(&self.e);
        v[B..B + 3].copy_from_slice(&self.b);
        v
    }

    pub fn from_slice(v: &[Complex64]) -> Self {
        assert_eq!(v.len(), DIM);
        Self {
            rho1: v[RHO],
            u1: [v[U], v[U + 1], v[U + 2]],
            theta1: v[THETA],
            e: [v[E], v[E + 1], v[E + 2]],
            b: [v[B], v[B + 1], v[B + 2]],
        }
    }

    pub fn norm(&self) -> f64 {
        self.to_array().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(i/2) k . E + rho_1`.
    pub fn gauss_residual(&self, k: &DiffWaveVector) -> Complex64 {
        0.5 * I * dot(k.k(), &self.e) + self.rho1
    }

    /// `k . B`.
    pub fn div_b_residual(&self, k: &DiffWaveVector) -> Complex64 {
        dot(k.k(), &self.b)
    }
}

fn dot(k: [f64; 3], v: &[Complex64; 3]) -> Complex64 {
    v[0] * k[0] + v[1] * k[1] + v[2] * k[2]
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffGenerator {
    pub m: CMatrix,
}

/// Levi-Civita `(a, b, c)` triples with sign.
const EPS: [(usize, usize, usize, f64); 6] =
    [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0), (0, 2, 1, -1.0), (2, 1, 0, -1.0), (1, 0, 2, -1.0)];

/// The symbol for any `k`, including `k = 0` (relaxation only).
pub(crate) fn generator_matrix(k: [f64; 3]) -> CMatrix {
    let mut m = CMatrix::zeros(DIM);
    for j in 0..3 {
        let ikj = I * k[j];
        m[(RHO, U + j)] = -ikj;
        m[(U + j, RHO)] = -ikj;
        m[(U + j, THETA)] = -ikj;
        m[(U + j, E + j)] = Complex64::new(-1.0, 0.0);
        m[(U + j, U + j)] = Complex64::new(-1.0, 0.0);
        m[(THETA, U + j)] = -ikj;
        m[(E + j, U + j)] = Complex64::new(2.0, 0.0);
    }
    m[(THETA, THETA)] = Complex64::new(-1.0, 0.0);
    // (k x V)_a = eps_abc k_b V_c
    for &(a, b, c, s) in &EPS {
        m[(E + a, B + c)] += I * (s * k[b]);
        m[(B + a, E + c)] -= I * (s * k[b]);
    }
    m
}

pub fn diff_mode_matrix(k: &DiffWaveVector) -> DiffGenerator {
    DiffGenerator { m: generator_matrix(k.k()) }
}

/// `exp(M t)` for the symbol at `k`; `k = 0` is allowed.
pub(crate) fn propagator_matrix(k: [f64; 3], t: f64) -> Result<CMatrix> {
    expm(&generator_matrix(k), t).map_err(|e| match e {
        Error::Expm { reason, t, .. } => {
            Error::Expm { reason, kmag: (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt(), t }
        }
        other => other,
    })
}

pub fn diff_propagator(k: &DiffWaveVector, t: f64) -> Result<CMatrix> {
    propagator_matrix(k.k(), t)
}

const CONSTRAINT_TOL: f64 = 1e-10;

pub fn check_constraints(k: &DiffWaveVector, ic: &DiffModeState) -> Result<()> {
    let scale = ic.norm().max(1.0);
    let g = ic.gauss_residual(k).norm();
    if g > CONSTRAINT_TOL * scale {
        return Err(Error::ConstraintViolation { what: "(i/2) k.E + rho_1", residual: g, tol: CONSTRAINT_TOL * scale });
    }
    let d = ic.div_b_residual(k).norm();
    if d > CONSTRAINT_TOL * scale {
        return Err(Error::ConstraintViolation { what: "k.B", residual: d, tol: CONSTRAINT_TOL * scale });
    }
    Ok(())
}

pub fn diff_mode_evolve(k: &DiffWaveVector, ic: &DiffModeState, t: f64) -> Result<DiffModeState> {
    check_constraints(k, ic)?;
    if t == 0.0 {
        return Ok(*ic);
    }
    let p = diff_propagator(k, t)?;
    Ok(DiffModeState::from_slice(&p.matvec(&ic.to_array())))
}

/// Longitudinal `E` that satisfies the Gauss constraint for the given `rho_1`.
pub fn gauss_longitudinal_e(k: &DiffWaveVector, rho1: Complex64) -> [Complex64; 3] {
    // (i/2) k . E = -rho_1 with E parallel to k
    let kt = k.ktilde();
    let amp = 2.0 * I * rho1 / k.kmag();
    kt.map(|x| amp * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(a: f64, b: f64) -> Complex64 {
        Complex64::new(a, b)
    }

    fn cross(a: [f64; 3], b: [Complex64; 3]) -> [Complex64; 3] {
        [b[2] * a[1] - b[1] * a[2], b[0] * a[2] - b[2] * a[0], b[1] * a[0] - b[0] * a[1]]
    }

    pub(crate) fn random_constrained(k: &DiffWaveVector, rng: &mut ChaCha8Rng) -> DiffModeState {
        let mut z = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let rho1 = z();
        let u1 = [z(), z(), z()];
        let theta1 = z();
        let kt = k.ktilde();
        let raw_e = [z(), z(), z()];
        let raw_b = [z(), z(), z()];
        let proj = |v: [Complex64; 3]| {
            let p = dot(kt, &v);
            [v[0] - p * kt[0], v[1] - p * kt[1], v[2] - p * kt[2]]
        };
        let el = gauss_longitudinal_e(k, rho1);
        let et = proj(raw_e);
        DiffModeState { rho1, u1, theta1, e: [el[0] + et[0], el[1] + et[1], el[2] + et[2]], b: proj(raw_b) }
    }

    #[test]
    fn rejects_zero_vector() {
        assert!(DiffWaveVector::new([0.0; 3]).is_err());
        let k = DiffWaveVector::new([3.0, 0.0, 4.0]).unwrap();
        assert_eq!(k.kmag(), 5.0);
        let kt = k.ktilde();
        assert!(((kt[0] * kt[0] + kt[1] * kt[1] + kt[2] * kt[2]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn continuity_row() {
        let g = diff_mode_matrix(&DiffWaveVector::along_x(1.0).unwrap());
        for j in 0..DIM {
            let want = if j == U { c(0.0, -1.0) } else { c(0.0, 0.0) };
            assert_eq!(g.m[(RHO, j)], want);
        }
    }

    #[test]
    fn rows_match_symbol() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let kv = [0.3, -1.1, 0.7];
        let k = DiffWaveVector::new(kv).unwrap();
        let m = diff_mode_matrix(&k).m;
        let s = random_constrained(&k, &mut rng);
        let d = DiffModeState::from_slice(&m.matvec(&s.to_array()));
        let ik = kv.map(|x| I * x);
        let kdotu = dot(kv, &s.u1);
        assert!((d.rho1 + I * kdotu).norm() < 1e-14);
        assert!((d.theta1 + I * kdotu + s.theta1).norm() < 1e-14);
        let kxb = cross(kv, s.b);
        let kxe = cross(kv, s.e);
        for j in 0..3 {
            let du = -ik[j] * s.rho1 - ik[j] * s.theta1 - s.e[j] - s.u1[j];
            assert!((d.u1[j] - du).norm() < 1e-14);
            assert!((d.e[j] - (I * kxb[j] + 2.0 * s.u1[j])).norm() < 1e-14);
            assert!((d.b[j] + I * kxe[j]).norm() < 1e-14);
        }
    }

    #[test]
    fn generator_preserves_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let kv = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let k = DiffWaveVector::new(kv).unwrap();
            let m = diff_mode_matrix(&k).m;
            // arbitrary, not necessarily constrained, state: derivative of the functionals is 0
            let v: Vec<Complex64> = (0..DIM).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let d = DiffModeState::from_slice(&m.matvec(&v));
            assert!(d.gauss_residual(&k).norm() < 1e-13);
            assert!(d.div_b_residual(&k).norm() < 1e-13);
        }
    }

    #[test]
    fn evolve_identity_and_semigroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let kv = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let k = DiffWaveVector::new(kv).unwrap();
            let s = random_constrained(&k, &mut rng);
            assert_eq!(diff_mode_evolve(&k, &s, 0.0).unwrap(), s);
            let (t1, t2) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
            let a = diff_mode_evolve(&k, &diff_mode_evolve(&k, &s, t1).unwrap(), t2).unwrap();
            let b = diff_mode_evolve(&k, &s, t1 + t2).unwrap();
            let diff: f64 = a.to_array().iter().zip(b.to_array()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            assert!(diff <= 1e-9 * b.norm().max(1e-300));
        }
    }

    #[test]
    fn rejects_unconstrained_ic() {
        let k = DiffWaveVector::along_x(1.0).unwrap();
        let s = DiffModeState { rho1: c(1.0, 0.0), ..Default::default() };
        assert!(matches!(diff_mode_evolve(&k, &s, 1.0), Err(Error::ConstraintViolation { .. })));
        let s = DiffModeState { b: [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], ..Default::default() };
        assert!(diff_mode_evolve(&k, &s, 1.0).is_err());
    }

    #[test]
    fn zero_mode_is_pure_relaxation() {
        let p = propagator_matrix([0.0; 3], 1.5).unwrap();
        let e = (-1.5f64).exp();
        assert!((p[(RHO, RHO)] - 1.0).norm() < 1e-14);
        assert!((p[(THETA, THETA)] - e).norm() < 1e-14);
        assert!((p[(B, B)] - 1.0).norm() < 1e-14);
    }
}
