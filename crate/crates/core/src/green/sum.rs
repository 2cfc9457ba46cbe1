//! Explicit per-mode solution of the linearized sum system.
//!
//! Each of `rho_2`, `k~ . u_2` and `Theta_2` solves the same third-order ODE,
//! so each is `c e^{sigma t} + e^{beta t} (c' cos(omega t) + c'' sin(omega t))`.
//! The transverse velocity only relaxes, `u_perp(t) = e^{-t} u_perp(0)`.

use num_complex::Complex64;

use crate::dispersion::{root_triple, RootTriple, WaveMag};
use crate::error::{Error, Result};
use crate::linalg::{matmul3, matvec3, solve3, Mat3};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Initial data of one longitudinal mode: `(rho, k~ . u, Theta)` at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SumModeIC {
    pub rho0: Complex64,
    pub ulong0: Complex64,
    pub theta0: Complex64,
}

impl SumModeIC {
    pub fn new(rho0: Complex64, ulong0: Complex64, theta0: Complex64) -> Self {
        Self { rho0, ulong0, theta0 }
    }

    /// Column order used by every 3x3 map in this module.
    pub fn as_array(&self) -> [Complex64; 3] {
        [self.rho0, self.ulong0, self.theta0]
    }

    pub fn norm(&self) -> f64 {
        (self.rho0.norm_sqr() + self.ulong0.norm_sqr() + self.theta0.norm_sqr()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `(value, d/dt, d^2/dt^2)` at `t = 0` for each scalar channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumIcDerivatives {
    pub rho: [Complex64; 3],
    pub theta: [Complex64; 3],
    pub ulong: [Complex64; 3],
}

/// Rows are `(value, d/dt, d^2/dt^2)`, columns act on `(rho0, ulong0, theta0)`.
pub fn derivative_matrices(kmag: WaveMag) -> (Mat3, Mat3, Mat3) {
    let k = kmag.get();
    let k2 = kmag.squared();
    let ik = I * k;
    let z = re(0.0);
    let one = re(1.0);
    let rho = [[one, z, z], [z, -ik, z], [re(-k2), ik, re(-k2)]];
    let theta = [[z, z, one], [z, -ik, -one], [re(-k2), 2.0 * ik, re(1.0 - k2)]];
    let ulong = [[z, one, z], [-ik, -one, -ik], [ik, re(1.0 - 2.0 * k2), 2.0 * ik]];
    (rho, theta, ulong)
}

pub fn sum_ic_derivatives(kmag: WaveMag, ic: SumModeIC) -> SumIcDerivatives {
    let (r, th, u) = derivative_matrices(kmag);
    let v = ic.as_array();
    SumIcDerivatives { rho: matvec3(&r, &v), theta: matvec3(&th, &v), ulong: matvec3(&u, &v) }
}

/// The nine coefficients: `c[0..3]` for `rho_2`, `c[3..6]` for `Theta_2`,
/// `c[6..9]` for `k~ . u_2`, each as (slow, cos, sin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub c: [Complex64; 9],
}

impl ModeCoefficients {
    pub fn rho(&self) -> [Complex64; 3] {
        [self.c[0], self.c[1], self.c[2]]
    }

    pub fn theta(&self) -> [Complex64; 3] {
        [self.c[3], self.c[4], self.c[5]]
    }

    pub fn ulong(&self) -> [Complex64; 3] {
        [self.c[6], self.c[7], self.c[8]]
    }

    fn from_parts(rho: [Complex64; 3], theta: [Complex64; 3], ulong: [Complex64; 3]) -> Self {
        let mut c = [re(0.0); 9];
        c[0..3].copy_from_slice(&rho);
        c[3..6].copy_from_slice(&theta);
        c[6..9].copy_from_slice(&ulong);
        Self { c }
    }
}

/// The matrix mapping `(c_slow, c_cos, c_sin)` to `(value, d/dt, d^2/dt^2)` at `t = 0`.
pub fn coefficient_matrix(r: &RootTriple) -> [[f64; 3]; 3] {
    let (s, b, w) = (r.sigma, r.beta, r.omega);
    [[1.0, 1.0, 0.0], [s, b, w], [s * s, b * b - w * w, 2.0 * b * w]]
}

/// `det = omega (omega^2 + (sigma - beta)^2)`.
pub fn coefficient_det(r: &RootTriple) -> f64 {
    r.omega * r.gap()
}

/// Inverse of [`coefficient_matrix`] from its adjugate, written out by hand.
pub fn coefficient_matrix_inverse(r: &RootTriple) -> [[f64; 3]; 3] {
    let (s, b, w) = (r.sigma, r.beta, r.omega);
    let d = coefficient_det(r);
    [
        [(b * b + w * w) * w / d, -2.0 * b * w / d, w / d],
        [s * (s - 2.0 * b) * w / d, 2.0 * b * w / d, -w / d],
        [s * (b * b - w * w - s * b) / d, (w * w + s * s - b * b) / d, (b - s) / d],
    ]
}

fn check_det(r: &RootTriple) -> Result<()> {
    let det = coefficient_det(r);
    if det.is_finite() && det > 0.0 {
        Ok(())
    } else {
        Err(Error::SingularSystem { kmag: r.kmag, det })
    }
}

fn real_to_complex(a: &[[f64; 3]; 3]) -> Mat3 {
    a.map(|row| row.map(re))
}

fn solve_channel(a: &Mat3, rhs: [Complex64; 3], r: &RootTriple) -> Result<[Complex64; 3]> {
    solve3(a, rhs).ok_or(Error::SingularSystem { kmag: r.kmag, det: coefficient_det(r) })
}

/// Coefficients from a direct 3x3 solve against the initial derivatives.
pub fn sum_mode_coefficients(kmag: WaveMag, ic: SumModeIC) -> Result<ModeCoefficients> {
    let r = root_triple(kmag)?;
    coefficients_with_roots(&r, kmag, ic)
}

pub(crate) fn coefficients_with_roots(r: &RootTriple, kmag: WaveMag, ic: SumModeIC) -> Result<ModeCoefficients> {
    check_det(r)?;
    let a = real_to_complex(&coefficient_matrix(r));
    let d = sum_ic_derivatives(kmag, ic);
    Ok(ModeCoefficients::from_parts(
        solve_channel(&a, d.rho, r)?,
        solve_channel(&a, d.theta, r)?,
        solve_channel(&a, d.ulong, r)?,
    ))
}

/// Coefficient maps `(rho0, ulong0, theta0) -> (c_slow, c_cos, c_sin)` obtained
/// as `A^{-1} D` with the hand-written inverse. Order: rho, theta, ulong.
pub fn coefficient_maps(r: &RootTriple) -> Result<(Mat3, Mat3, Mat3)> {
    check_det(r)?;
    let kmag = WaveMag::new(r.kmag)?;
    let inv = real_to_complex(&coefficient_matrix_inverse(r));
    let (dr, dth, du) = derivative_matrices(kmag);
    Ok((matmul3(&inv, &dr), matmul3(&inv, &dth), matmul3(&inv, &du)))
}

/// The simplified closed-form coefficient maps, transcribed entry by entry.
///
/// Several entries do not agree with [`coefficient_maps`]; use
/// [`closed_form_agreement`] to see which. Order: rho, theta, ulong.
pub fn closed_form_maps(r: &RootTriple) -> (Mat3, Mat3, Mat3) {
    let (s, w, k) = (r.sigma, r.omega, r.kmag);
    let k2 = k * k;
    let g = r.gap();
    let ik = I * k;
    let sp1 = s + 1.0;

    let rho = [
        [re(sp1 * sp1 + k2), -ik * sp1, re(-k2)],
        [re(2.0 * sp1 + k2), ik * sp1, re(k2)],
        [
            re((s * sp1 + (1.0 - 0.5 * s) * k2) / w),
            ik / w * (1.5 * s * s + 1.5 * s + 2.0 * k2),
            re((1.0 + 1.5 * s) / w * k2),
        ],
    ];
    let theta = [
        [re(-k2), -ik * sp1, re(sp1 * s + k2)],
        [re(k2), ik * sp1, re((1.0 + 2.0 * s) * sp1 + k2)],
        [
            re((1.5 * s + 1.0) / w * k2),
            -ik / w * (1.5 * s * (s + 2.0) + 1.0 + 2.0 * k2),
            re(-(k2 + 0.5 * s * (k2 + 1.0 + s)) / w),
        ],
    ];
    let ulong = [
        [-ik * sp1, re(s * sp1), -ik * s],
        [ik * sp1, re(sp1 * (1.0 + 2.0 * s) + 2.0 * k2), ik * s],
        [
            -ik / w * (1.5 * s * sp1 - 2.0 * k2),
            re(-s * (sp1 - 2.0 * k2) / (2.0 * w)),
            ik / w * (-1.5 * s * (s + 2.0) + 2.0 * k2 - 1.0),
        ],
    ];
    let scale = |m: Mat3| m.map(|row| row.map(|z| z / g));
    (scale(rho), scale(theta), scale(ulong))
}

pub fn closed_form_coefficients(kmag: WaveMag, ic: SumModeIC) -> Result<ModeCoefficients> {
    let r = root_triple(kmag)?;
    let (mr, mth, mu) = closed_form_maps(&r);
    let v = ic.as_array();
    Ok(ModeCoefficients::from_parts(matvec3(&mr, &v), matvec3(&mth, &v), matvec3(&mu, &v)))
}

/// Per-entry agreement between the closed-form and solved coefficient maps.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormAgreement {
    pub kmag: f64,
    /// `[channel][row][col]` relative discrepancy, channels ordered rho, theta, ulong.
    pub rel_error: [[[f64; 3]; 3]; 3],
}

impl ClosedFormAgreement {
    pub const CHANNELS: [&'static str; 3] = ["rho", "theta", "ulong"];

    pub fn agrees(&self, tol: f64) -> [[[bool; 3]; 3]; 3] {
        self.rel_error.map(|m| m.map(|row| row.map(|e| e <= tol)))
    }

    /// `(channel, row, col)` of every entry (1-based row/col) off by more than `tol`.
    pub fn disagreements(&self, tol: f64) -> Vec<(&'static str, usize, usize)> {
        let mut out = Vec::new();
        for (ch, m) in self.rel_error.iter().enumerate() {
            for (i, row) in m.iter().enumerate() {
                for (j, &e) in row.iter().enumerate() {
                    if e > tol {
                        out.push((Self::CHANNELS[ch], i + 1, j + 1));
                    }
                }
            }
        }
        out
    }
}

pub fn closed_form_agreement(kmag: WaveMag) -> Result<ClosedFormAgreement> {
    let r = root_triple(kmag)?;
    let solved = coefficient_maps(&r)?;
    let closed = closed_form_maps(&r);
    let pairs = [(solved.0, closed.0), (solved.1, closed.1), (solved.2, closed.2)];
    let mut rel_error = [[[0.0; 3]; 3]; 3];
    for (ch, (a, b)) in pairs.iter().enumerate() {
        let scale = a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        for i in 0..3 {
            for j in 0..3 {
                rel_error[ch][i][j] = (a[i][j] - b[i][j]).norm() / scale;
            }
        }
    }
    Ok(ClosedFormAgreement { kmag: r.kmag, rel_error })
}

/// `n`-th time derivative of `c_slow e^{sigma t} + e^{beta t}(c_cos cos + c_sin sin)`.
///
/// Uses `e^{beta t}(a cos + b sin) = (a - i b)/2 e^{lambda t} + (a + i b)/2 e^{conj(lambda) t}`
/// with `lambda = beta + i omega`.
pub fn channel_derivative(r: &RootTriple, c: [Complex64; 3], t: f64, n: u32) -> Complex64 {
    let lam = r.upper();
    let slow = c[0] * r.sigma.powi(n as i32) * (r.sigma * t).exp();
    if n == 0 {
        let (sn, cs) = (r.omega * t).sin_cos();
        return slow + (r.beta * t).exp() * (c[1] * cs + c[2] * sn);
    }
    let plus = 0.5 * (c[1] - I * c[2]) * lam.powu(n) * (lam * t).exp();
    let minus = 0.5 * (c[1] + I * c[2]) * lam.conj().powu(n) * (lam.conj() * t).exp();
    slow + plus + minus
}

/// `(rho_2, k~ . u_2, Theta_2)` at time `t` from its coefficients.
pub fn evaluate_coefficients(r: &RootTriple, c: &ModeCoefficients, t: f64, n: u32) -> [Complex64; 3] {
    [
        channel_derivative(r, c.rho(), t, n),
        channel_derivative(r, c.ulong(), t, n),
        channel_derivative(r, c.theta(), t, n),
    ]
}

/// `(rho_2, k~ . u_2, Theta_2)` at time `t`.
pub fn sum_mode_evolve(kmag: WaveMag, ic: SumModeIC, t: f64) -> Result<[Complex64; 3]> {
    let r = root_triple(kmag)?;
    let c = coefficients_with_roots(&r, kmag, ic)?;
    Ok(evaluate_coefficients(&r, &c, t, 0))
}

/// `e^{-t} u_perp(0)`; the caller projects out the longitudinal part.
pub fn sum_perp_evolve(t: f64, uperp0: [Complex64; 3]) -> [Complex64; 3] {
    let d = (-t).exp();
    uperp0.map(|z| z * d)
}

/// The 3x3 longitudinal propagator acting on `(rho, k~ . u, Theta)`.
///
/// Rows and columns are both ordered `(rho, ulong, theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumPropagator {
    pub roots: RootTriple,
    maps: [Mat3; 3],
}

impl SumPropagator {
    pub fn new(kmag: WaveMag) -> Result<Self> {
        let roots = root_triple(kmag)?;
        let (mr, mth, mu) = coefficient_maps(&roots)?;
        Ok(Self { roots, maps: [mr, mu, mth] })
    }

    /// Column `j` is the solution started from the `j`-th unit vector.
    pub fn matrix(&self, t: f64) -> Mat3 {
        let mut out = [[re(0.0); 3]; 3];
        for (i, map) in self.maps.iter().enumerate() {
            for j in 0..3 {
                out[i][j] = channel_derivative(&self.roots, [map[0][j], map[1][j], map[2][j]], t, 0);
            }
        }
        out
    }

    pub fn apply(&self, t: f64, state: [Complex64; 3]) -> [Complex64; 3] {
        matvec3(&self.matrix(t), &state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn wm(k: f64) -> WaveMag {
        WaveMag::new(k).unwrap()
    }

    fn c(a: f64, b: f64) -> Complex64 {
        Complex64::new(a, b)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn derivative_examples() {
        let d = sum_ic_derivatives(wm(1.0), SumModeIC::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
        assert_eq!(d.rho, [c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(d.theta, [c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(d.ulong, [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0)]);

        let d = sum_ic_derivatives(wm(2.0), SumModeIC::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)));
        assert_eq!(d.rho, [c(0.0, 0.0), c(0.0, -2.0), c(0.0, 2.0)]);
        assert_eq!(d.theta, [c(0.0, 0.0), c(0.0, -2.0), c(0.0, 4.0)]);
        assert_eq!(d.ulong, [c(1.0, 0.0), c(-1.0, 0.0), c(-7.0, 0.0)]);

        let d = sum_ic_derivatives(wm(0.3), SumModeIC::default());
        assert!(d.rho.iter().chain(&d.theta).chain(&d.ulong).all(|z| *z == c(0.0, 0.0)));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let k = wm(2.0);
        let ic = SumModeIC::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let d = sum_ic_derivatives(k, ic);
        let h = 1e-4;
        let f = |t| sum_mode_evolve(k, ic, t).unwrap();
        let (p, z, m) = (f(h), f(0.0), f(-h));
        // evolve order is (rho, ulong, theta)
        let want = [d.rho, d.ulong, d.theta];
        for ch in 0..3 {
            let d1 = (p[ch] - m[ch]) / (2.0 * h);
            let d2 = (p[ch] - 2.0 * z[ch] + m[ch]) / (h * h);
            assert!(close(d1, want[ch][1], 1e-6), "{ch}: {d1} vs {}", want[ch][1]);
            assert!(close(d2, want[ch][2], 1e-5), "{ch}: {d2} vs {}", want[ch][2]);
        }
    }

    #[test]
    fn unit_k_slow_coefficient() {
        let k = wm(1.0);
        let co = sum_mode_coefficients(k, SumModeIC::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))).unwrap();
        let s = root_triple(k).unwrap().sigma;
        let want = ((s + 1.0).powi(2) + 1.0) / (3.0 * s * s + 4.0 * s + 3.0);
        assert!(close(co.c[0], c(want, 0.0), 1e-12));
        assert!((co.c[0].re - 0.722124).abs() < 1e-5);
        assert!(close(co.c[0] + co.c[1], c(1.0, 0.0), 1e-14));
        assert!(close(co.c[3] + co.c[4], c(0.0, 0.0), 1e-14));
        assert!(close(co.c[6] + co.c[7], c(0.0, 0.0), 1e-14));
    }

    #[test]
    fn inverse_is_inverse() {
        for k in [1e-3, 0.1, 1.0, 10.0, 1e3] {
            let r = root_triple(wm(k)).unwrap();
            let a = coefficient_matrix(&r);
            let b = coefficient_matrix_inverse(&r);
            for i in 0..3 {
                for j in 0..3 {
                    let p: f64 = (0..3).map(|l| a[i][l] * b[l][j]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((p - want).abs() < 1e-9, "k={k} ({i},{j}) {p}");
                }
            }
        }
    }

    #[test]
    fn direct_solve_matches_explicit_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..500 {
            let k = 10f64.powf(rng.gen_range(-3.0..3.0));
            let ic = SumModeIC::new(
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
            let direct = sum_mode_coefficients(wm(k), ic).unwrap();
            let r = root_triple(wm(k)).unwrap();
            let (mr, mth, mu) = coefficient_maps(&r).unwrap();
            let v = ic.as_array();
            let via: Vec<Complex64> =
                [matvec3(&mr, &v), matvec3(&mth, &v), matvec3(&mu, &v)].into_iter().flatten().collect();
            let scale = direct.c.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (a, b) in direct.c.iter().zip(&via) {
                assert!((a - b).norm() <= 1e-10 * scale, "k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn closed_form_flags_the_inconsistent_entries() {
        for k in [0.3, 1.0, 3.0] {
            let ag = closed_form_agreement(wm(k)).unwrap();
            let ok = ag.agrees(1e-10);
            // rho map: (2,1) and (3,2) are off
            assert_eq!(ok[0], [[true, true, true], [false, true, true], [true, false, true]], "k={k}");
            // theta map: column 2 rows 1 and 2 are off
            assert_eq!(ok[1], [[true, false, true], [true, false, true], [true, true, true]], "k={k}");
            // ulong map: (3,1) and (3,3) are off
            assert_eq!(ok[2], [[true, true, true], [true, true, true], [false, true, false]], "k={k}");
        }
    }

    #[test]
    fn corrected_entries_match() {
        for k in [0.2, 1.0, 4.0] {
            let r = root_triple(wm(k)).unwrap();
            let (s, w) = (r.sigma, r.omega);
            let g = r.gap();
            let (mr, _, _) = coefficient_maps(&r).unwrap();
            let e21 = (2.0 * s * (s + 1.0) + k * k) / g;
            assert!((mr[1][0] - c(e21, 0.0)).norm() < 1e-10);
            let e32 = -c(0.0, k) / w * (1.5 * s * s + 1.5 * s + 2.0 * k * k) / g;
            assert!((mr[2][1] - e32).norm() < 1e-10);
        }
    }

    #[test]
    fn reconstruction_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let k = 10f64.powf(rng.gen_range(-3.0..3.0));
            let ic = SumModeIC::new(
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
            let v = sum_mode_evolve(wm(k), ic, 0.0).unwrap();
            assert!(close(v[0], ic.rho0, 1e-13));
            assert!(close(v[1], ic.ulong0, 1e-13));
            assert!(close(v[2], ic.theta0, 1e-13));
        }
    }

    #[test]
    fn long_time_dominated_by_slow_root() {
        let k = wm(1.0);
        let ic = SumModeIC::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let r = root_triple(k).unwrap();
        let co = sum_mode_coefficients(k, ic).unwrap();
        let v = sum_mode_evolve(k, ic, 10.0).unwrap();
        let want = co.c[0].norm() * (10.0 * r.sigma).exp();
        assert!((v[0].norm() / want - 1.0).abs() < 0.05);
    }

    #[test]
    fn perp_channel() {
        let u = [c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0)];
        assert_eq!(sum_perp_evolve(0.0, u), u);
        let h = sum_perp_evolve(2f64.ln(), u);
        for i in 0..3 {
            assert!(close(h[i], u[i] * 0.5, 1e-16));
        }
    }

    #[test]
    fn propagator_matches_evolve() {
        let k = wm(0.7);
        let p = SumPropagator::new(k).unwrap();
        let ic = SumModeIC::new(c(0.3, -0.1), c(0.0, 0.5), c(-0.2, 0.0));
        for t in [0.0, 0.4, 3.0, 25.0] {
            let a = p.apply(t, ic.as_array());
            let b = sum_mode_evolve(k, ic, t).unwrap();
            for i in 0..3 {
                assert!(close(a[i], b[i], 1e-13));
            }
        }
    }
}
