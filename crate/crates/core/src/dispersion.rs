//! Roots of the characteristic cubic of the linearized sum system.
//!
//! Every longitudinal Fourier mode of the sum (half-sum) variables obeys the
//! third-order scalar ODE whose symbol is
//!
//! ```text
//! F(x) = x^3 + 2x^2 + (1 + 2|k|^2) x + |k|^2
//! ```
//!
//! `F` is strictly increasing on the real line with `F(-1/2) = -1/8` and
//! `F(0) = |k|^2`, so it has exactly one real root `sigma` in `(-1/2, 0)`.
//! The remaining pair is `beta +- i omega` with `beta = -1 - sigma/2`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Wavenumber magnitude `|k| > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct WaveMag(f64);

impl WaveMag {
    pub fn new(kmag: f64) -> Result<Self> {
        if kmag.is_finite() && kmag > 0.0 {
            Ok(Self(kmag))
        } else {
            Err(Error::InvalidWaveMag(kmag))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn squared(self) -> f64 {
        self.0 * self.0
    }
}

/// Characteristic roots `(sigma, beta, omega)` of one Fourier mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootTriple {
    pub kmag: f64,
    pub sigma: f64,
    pub beta: f64,
    pub omega: f64,
}

impl RootTriple {
    /// The complex root `beta + i omega`.
    pub fn upper(&self) -> Complex64 {
        Complex64::new(self.beta, self.omega)
    }

    /// `3 sigma^2 + 4 sigma + 1 + 2|k|^2`, which equals `omega^2 + (sigma - beta)^2`.
    pub fn gap(&self) -> f64 {
        let s = self.sigma;
        3.0 * s * s + 4.0 * s + 1.0 + 2.0 * self.kmag * self.kmag
    }
}

const MAX_ITERATIONS: usize = 200;
const RESIDUAL_TOL: f64 = 1e-14;
const BRACKET_TOL: f64 = 1e-15;

pub fn charpoly_eval(kmag: WaveMag, x: f64) -> f64 {
    let k2 = kmag.squared();
    ((x + 2.0) * x + (1.0 + 2.0 * k2)) * x + k2
}

pub fn charpoly_eval_complex(kmag: WaveMag, z: Complex64) -> Complex64 {
    let k2 = kmag.squared();
    ((z + 2.0) * z + (1.0 + 2.0 * k2)) * z + k2
}

fn charpoly_derivative(kmag: WaveMag, x: f64) -> f64 {
    3.0 * x * x + 4.0 * x + 1.0 + 2.0 * kmag.squared()
}

/// The unique real root of `F` in `(-1/2, 0)`.
///
/// Safeguarded Newton inside the sign-change bracket `[-1/2, 0]`; any Newton
/// iterate that leaves the current bracket is replaced by a bisection step.
pub fn solve_real_root(kmag: WaveMag) -> Result<f64> {
    let k = kmag.get();
    let k2 = kmag.squared();
    let tol = RESIDUAL_TOL * k2.max(1.0);
    let (mut lo, mut hi) = (-0.5_f64, 0.0_f64);

    // leading-order asymptotics give a starting point close to the root
    let mut x = if k < 1.0 { -k2 / (1.0 + 2.0 * k2) } else { -0.5 + 1.0 / (16.0 * k2) };
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }

    for _ in 0..MAX_ITERATIONS {
        let f = charpoly_eval(kmag, x);
        if f.abs() < tol {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo < BRACKET_TOL {
            return Ok(x);
        }
        let newton = x - f / charpoly_derivative(kmag, x);
        x = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    Err(Error::RootNonConvergence { kmag: k, lo, hi })
}

pub fn root_triple(kmag: WaveMag) -> Result<RootTriple> {
    let sigma = solve_real_root(kmag)?;
    let k2 = kmag.squared();
    Ok(RootTriple {
        kmag: kmag.get(),
        sigma,
        beta: -1.0 - 0.5 * sigma,
        omega: 0.5 * (3.0 * sigma * sigma + 4.0 * sigma + 8.0 * k2).sqrt(),
    })
}

/// `d sigma / d|k|` from implicit differentiation of `F(sigma(|k|)) = 0`.
pub fn sigma_derivative(roots: &RootTriple) -> f64 {
    let s = roots.sigma;
    let k = roots.kmag;
    -k * (2.0 + 4.0 * s) / (3.0 * s * s + 4.0 * s + 1.0 + 2.0 * k * k)
}

/// `n` log-spaced magnitudes on `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let mut g: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
            g[0] = lo;
            g[n - 1] = hi;
            g
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wm(k: f64) -> WaveMag {
        WaveMag::new(k).unwrap()
    }

    /// Plain bisection, independent of the Newton path.
    fn bisect(k: f64) -> f64 {
        let kmag = wm(k);
        let (mut lo, mut hi) = (-0.5, 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if charpoly_eval(kmag, mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn charpoly_examples() {
        assert_eq!(charpoly_eval(wm(3.0), 0.0), 9.0);
        for k in [1e-3, 0.5, 1.0, 7.0, 1e3] {
            assert!((charpoly_eval(wm(k), -0.5) + 0.125).abs() < 1e-12 * k * k.max(1.0));
        }
        let v = charpoly_eval(wm(1.0), -0.4302);
        let direct = -0.4302f64.powi(3) + 2.0 * 0.4302f64.powi(2) - 3.0 * 0.4302 + 1.0;
        assert!((v - direct).abs() < 1e-15);
        assert!((v + 7.3912e-5).abs() < 1e-8, "{v}");
    }

    #[test]
    fn rejects_nonpositive_kmag() {
        assert!(WaveMag::new(0.0).is_err());
        assert!(WaveMag::new(-1.0).is_err());
        assert!(WaveMag::new(f64::NAN).is_err());
    }

    #[test]
    fn root_matches_bisection_at_unit_k() {
        let s = solve_real_root(wm(1.0)).unwrap();
        assert!((s - bisect(1.0)).abs() < 1e-13);
        assert!((s + 0.43016).abs() < 1e-4);
    }

    #[test]
    fn small_and_large_k_asymptotics() {
        let k = 1e-3;
        let s = solve_real_root(wm(k)).unwrap();
        assert!(((s + k * k) / (k * k)).abs() < 1e-2);

        let k = 100.0;
        let s = solve_real_root(wm(k)).unwrap();
        let lead = 1.0 / (16.0 * k * k);
        assert!(((s + 0.5) - lead).abs() / lead < 1e-2);
    }

    #[test]
    fn unit_k_triple() {
        let r = root_triple(wm(1.0)).unwrap();
        assert!((r.beta + 0.78492).abs() < 1e-4);
        assert!((r.omega - 1.30714).abs() < 1e-4);
    }

    #[test]
    fn deterministic() {
        let a = solve_real_root(wm(0.37)).unwrap();
        let b = solve_real_root(wm(0.37)).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn vieta_reproduces_coefficients() {
        for k in log_grid(1e-3, 1e3, 37) {
            let r = root_triple(wm(k)).unwrap();
            // (x - s)(x^2 - 2 b x + b^2 + w^2)
            let p = r.beta * r.beta + r.omega * r.omega;
            let c2 = -2.0 * r.beta - r.sigma;
            let c1 = p + 2.0 * r.beta * r.sigma;
            let c0 = -r.sigma * p;
            let rel = |got: f64, want: f64| (got - want).abs() / want.abs().max(1.0);
            assert!(rel(c2, 2.0) < 1e-10);
            assert!(rel(c1, 1.0 + 2.0 * k * k) < 1e-10);
            assert!(rel(c0, k * k) < 1e-10, "k={k} c0={c0}");
        }
    }

    #[test]
    fn small_k_limits_of_complex_pair() {
        let mut prev_gap = f64::INFINITY;
        for k in [1e-1, 1e-2, 1e-3, 1e-4] {
            let r = root_triple(wm(k)).unwrap();
            let gap = (r.beta + 1.0).abs();
            assert!(gap < prev_gap);
            prev_gap = gap;
            assert!((r.omega / k - 1.0).abs() < 0.1);
        }
        assert!(prev_gap < 1e-7);
    }
}
