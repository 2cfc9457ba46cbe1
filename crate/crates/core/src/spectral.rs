//! Periodic grid on `[0, 2 pi L)^3`, 3-D FFTs and Fourier multipliers.
//!
//! Forward transforms are unnormalized, inverse transforms carry `1/N^3`.
//! Flattened index is `(i * N + j) * N + l` with `i` along `x`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    pub n: usize,
    pub l: f64,
    pub dealias: bool,
}

impl TorusGrid {
    pub fn new(n: usize, l: f64, dealias: bool) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N must be a power of two >= 8, got {n}")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidGrid(format!("L must be positive, got {l}")));
        }
        Ok(Self { n, l, dealias })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn volume(&self) -> f64 {
        (2.0 * PI * self.l).powi(3)
    }

    pub fn dx(&self) -> f64 {
        2.0 * PI * self.l / self.n as f64
    }

    /// Cell weight turning `sum |f^|^2` into the continuum `L^2` norm squared.
    pub fn spectral_weight(&self) -> f64 {
        self.volume() / (self.len() as f64).powi(2)
    }

    #[inline]
    pub fn unflatten(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    #[inline]
    pub fn flatten(&self, [i, j, l]: [usize; 3]) -> usize {
        (i * self.n + j) * self.n + l
    }

    /// Signed mode number in `(-N/2, N/2]`.
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// True wavevector `m / L`, with `|N/2|` at the Nyquist index.
    pub fn kvec(&self, idx: usize) -> [f64; 3] {
        self.unflatten(idx).map(|i| self.mode(i) as f64 / self.l)
    }

    /// Wavevector for odd-derivative symbols: the Nyquist component is zeroed.
    pub fn kvec_deriv(&self, idx: usize) -> [f64; 3] {
        let half = self.n / 2;
        self.unflatten(idx).map(|i| if i == half { 0.0 } else { self.mode(i) as f64 / self.l })
    }

    /// Index of `-k`.
    pub fn neg_index(&self, idx: usize) -> usize {
        let n = self.n;
        self.flatten(self.unflatten(idx).map(|i| (n - i) % n))
    }

    /// 2/3-rule mask: kept iff `3 |m_j| < N` on every axis.
    pub fn keep(&self, idx: usize) -> bool {
        let n = self.n as i64;
        self.unflatten(idx).iter().all(|&i| 3 * self.mode(i).abs() < n)
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let dx = self.dx();
        self.unflatten(idx).map(|i| i as f64 * dx)
    }

    pub fn check_len(&self, got: usize) -> Result<()> {
        if got == self.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.len(), got })
        }
    }
}

/// `sum_{|alpha| <= s} prod_j k_j^{2 alpha_j}`; zero for `s < 0`.
pub fn sobolev_multiplier(k: [f64; 3], s: i32) -> f64 {
    if s < 0 {
        return 0.0;
    }
    let s = s as usize;
    // h[d] = complete homogeneous polynomial of degree d in the squares seen so far
    let mut small = [0.0f64; 32];
    let mut large = Vec::new();
    let h: &mut [f64] = if s < 32 {
        &mut small[..=s]
    } else {
        large.resize(s + 1, 0.0);
        &mut large
    };
    let x = k[0] * k[0];
    h[0] = 1.0;
    for d in 1..=s {
        h[d] = h[d - 1] * x;
    }
    for v in [k[1] * k[1], k[2] * k[2]] {
        for d in 1..=s {
            h[d] += v * h[d - 1];
        }
    }
    h.iter().sum()
}

/// All multi-indices with `lo <= |alpha| <= hi`, in lexicographic order.
pub fn multi_indices(lo: usize, hi: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..=hi {
        for b in 0..=hi - a {
            for c in 0..=hi - a - b {
                if a + b + c >= lo {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

thread_local! {
    static WORK: std::cell::RefCell<(Vec<Complex64>, Vec<Complex64>)> = const { std::cell::RefCell::new((Vec::new(), Vec::new())) };
}

/// `dst[c * rows + r] = src[r * cols + c]`.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    debug_assert_eq!(src.len(), rows * cols);
    for (r, row) in src.chunks_exact(cols).enumerate() {
        for (c, v) in row.iter().enumerate() {
            dst[c * rows + r] = *v;
        }
    }
}

pub struct Fft3 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let n2 = n * n;
        assert_eq!(data.len(), n2 * n);
        WORK.with(|w| {
            let (buf, scratch) = &mut *w.borrow_mut();
            buf.resize(n2 * n, Complex64::new(0.0, 0.0));
            scratch.resize(plan.get_inplace_scratch_len(), Complex64::new(0.0, 0.0));
            // contiguous axis
            plan.process_with_scratch(data, scratch);
            // middle axis: transpose each (j, l) plane, batch, transpose back
            for (src, dst) in data.chunks_exact(n2).zip(buf.chunks_exact_mut(n2)) {
                transpose(src, dst, n, n);
            }
            plan.process_with_scratch(buf, scratch);
            for (src, dst) in buf.chunks_exact(n2).zip(data.chunks_exact_mut(n2)) {
                transpose(src, dst, n, n);
            }
            // slow axis: (i, jl) -> (jl, i)
            transpose(data, buf, n, n2);
            plan.process_with_scratch(buf, scratch);
            transpose(buf, data, n2, n);
        });
    }

    /// Inverse transform without the `1/N^3` factor.
    pub(crate) fn inverse_unscaled(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inv);
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.fwd);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inv);
        let s = 1.0 / (self.n * self.n * self.n) as f64;
        for z in data.iter_mut() {
            *z *= s;
        }
    }

    pub fn forward_real(&self, f: &[f64]) -> Vec<Complex64> {
        let mut d: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&mut d);
        d
    }

    pub fn inverse_real(&self, f: &[Complex64]) -> Vec<f64> {
        let mut d = f.to_vec();
        self.inverse(&mut d);
        d.into_iter().map(|z| z.re).collect()
    }

    /// Two real fields through one complex transform.
    pub fn forward_real_pair(&self, grid: &TorusGrid, f: &[f64], g: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut z: Vec<Complex64> = f.iter().zip(g).map(|(&a, &b)| Complex64::new(a, b)).collect();
        self.forward(&mut z);
        let n = grid.n;
        let mut fa = vec![Complex64::new(0.0, 0.0); z.len()];
        let mut ga = vec![Complex64::new(0.0, 0.0); z.len()];
        for i in 0..n {
            for j in 0..n {
                let row = (i * n + j) * n;
                let nrow = (((n - i) % n) * n + (n - j) % n) * n;
                for l in 0..n {
                    let idx = row + l;
                    let zn = z[nrow + (n - l) % n].conj();
                    fa[idx] = 0.5 * (z[idx] + zn);
                    ga[idx] = Complex64::new(0.0, -0.5) * (z[idx] - zn);
                }
            }
        }
        (fa, ga)
    }

    /// Inverse of two Hermitian spectra through one complex transform.
    pub fn inverse_real_pair(&self, f: &[Complex64], g: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let mut z: Vec<Complex64> = f.iter().zip(g).map(|(a, b)| Complex64::new(a.re - b.im, a.im + b.re)).collect();
        self.inverse_unscaled(&mut z);
        let sc = 1.0 / z.len() as f64;
        (z.iter().map(|w| w.re * sc).collect(), z.iter().map(|w| w.im * sc).collect())
    }
}

/// `(i k)^a` along one axis for every index; odd powers use the Nyquist-zeroed wavenumber.
fn axis_symbol(grid: &TorusGrid, a: usize) -> Vec<Complex64> {
    let half = grid.n / 2;
    (0..grid.n)
        .map(|i| {
            let k = if a % 2 == 1 && i == half { 0.0 } else { grid.mode(i) as f64 / grid.l };
            Complex64::new(0.0, k).powu(a as u32)
        })
        .collect()
}

/// The full symbol of `d^alpha`, flattened like the fields.
pub fn partial_symbol(grid: &TorusGrid, alpha: [usize; 3]) -> Vec<Complex64> {
    let [sx, sy, sz] = alpha.map(|a| axis_symbol(grid, a));
    let mut out = Vec::with_capacity(grid.len());
    for x in &sx {
        for y in &sy {
            let xy = x * y;
            out.extend(sz.iter().map(|z| xy * z));
        }
    }
    out
}

/// `i k_axis f^` with the Nyquist component zeroed.
pub fn spectral_derivative(grid: &TorusGrid, f: &[Complex64], axis: usize) -> Vec<Complex64> {
    let mut alpha = [0; 3];
    alpha[axis] = 1;
    spectral_partial(grid, f, alpha)
}

/// `(ik)^alpha f^`; odd powers use the Nyquist-zeroed wavenumber.
pub fn spectral_partial(grid: &TorusGrid, f: &[Complex64], alpha: [usize; 3]) -> Vec<Complex64> {
    f.iter().zip(partial_symbol(grid, alpha)).map(|(z, s)| z * s).collect()
}

pub fn apply_mask(grid: &TorusGrid, f: &mut [Complex64]) {
    if !grid.dealias {
        return;
    }
    for (idx, z) in f.iter_mut().enumerate() {
        if !grid.keep(idx) {
            *z = Complex64::new(0.0, 0.0);
        }
    }
}

/// Replace `f^(k)` by the average of `f^(k)` and `conj f^(-k)`.
pub fn hermitian_symmetrize(grid: &TorusGrid, f: &mut [Complex64]) {
    for idx in 0..f.len() {
        let neg = grid.neg_index(idx);
        if neg < idx {
            continue;
        }
        let avg = 0.5 * (f[idx] + f[neg].conj());
        f[idx] = avg;
        f[neg] = avg.conj();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(TorusGrid::new(4, 1.0, true).is_err());
        assert!(TorusGrid::new(12, 1.0, true).is_err());
        assert!(TorusGrid::new(16, 0.0, true).is_err());
        let g = TorusGrid::new(16, 2.0, true).unwrap();
        assert_eq!(g.len(), 4096);
        assert_eq!(g.mode(8), 8);
        assert_eq!(g.mode(9), -7);
        assert_eq!(g.kvec_deriv(g.flatten([8, 1, 15])), [0.0, 0.5, -0.5]);
        assert_eq!(g.kvec(g.flatten([8, 0, 0]))[0], 4.0);
    }

    #[test]
    fn neg_index_involution() {
        let g = TorusGrid::new(8, 1.0, false).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.neg_index(g.neg_index(idx)), idx);
            let (a, b) = (g.kvec_deriv(idx), g.kvec_deriv(g.neg_index(idx)));
            for j in 0..3 {
                assert_eq!(a[j], -b[j]);
            }
        }
    }

    #[test]
    fn mask_keeps_two_thirds() {
        let g = TorusGrid::new(16, 1.0, true).unwrap();
        // |m| <= 5 survives, 6 does not
        assert!(g.keep(g.flatten([5, 11, 0])));
        assert!(!g.keep(g.flatten([6, 0, 0])));
        assert!(!g.keep(g.flatten([0, 10, 0])));
    }

    #[test]
    fn fft_roundtrip_and_single_mode() {
        let g = TorusGrid::new(8, 1.0, false).unwrap();
        let fft = Fft3::new(8);
        let f: Vec<f64> = (0..g.len()).map(|i| g.position(i)).map(|x| (x[0]).sin() + 0.3 * (2.0 * x[2]).cos()).collect();
        let fh = fft.forward_real(&f);
        let m = g.len() as f64;
        let one = fh[g.flatten([1, 0, 0])];
        assert!((one - Complex64::new(0.0, -0.5 * m)).norm() < 1e-10);
        let back = fft.inverse_real(&fh);
        for (a, b) in f.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn pair_transforms_match_single() {
        let g = TorusGrid::new(8, 1.0, false).unwrap();
        let fft = Fft3::new(8);
        let f: Vec<f64> = (0..g.len()).map(|i| ((i * 7919) % 101) as f64 / 101.0).collect();
        let h: Vec<f64> = (0..g.len()).map(|i| ((i * 104729) % 97) as f64 / 97.0).collect();
        let (a, b) = fft.forward_real_pair(&g, &f, &h);
        let (a1, b1) = (fft.forward_real(&f), fft.forward_real(&h));
        for i in 0..g.len() {
            assert!((a[i] - a1[i]).norm() < 1e-10 && (b[i] - b1[i]).norm() < 1e-10);
        }
        let (x, y) = fft.inverse_real_pair(&a, &b);
        for i in 0..g.len() {
            assert!((x[i] - f[i]).abs() < 1e-12 && (y[i] - h[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_sine() {
        let g = TorusGrid::new(16, 1.0, false).unwrap();
        let fft = Fft3::new(16);
        let f: Vec<f64> = (0..g.len()).map(|i| (3.0 * g.position(i)[1]).sin()).collect();
        let d = fft.inverse_real(&spectral_derivative(&g, &fft.forward_real(&f), 1));
        for i in 0..g.len() {
            assert!((d[i] - 3.0 * (3.0 * g.position(i)[1]).cos()).abs() < 1e-12);
        }
        let d2 = fft.inverse_real(&spectral_partial(&g, &fft.forward_real(&f), [0, 2, 0]));
        for i in 0..g.len() {
            assert!((d2[i] + f[i] * 9.0).abs() < 1e-11);
        }
    }

    #[test]
    fn multiplier_values() {
        assert_eq!(sobolev_multiplier([1.0, 0.0, 0.0], 1), 2.0);
        assert_eq!(sobolev_multiplier([2.0, 0.0, 0.0], 2), 1.0 + 4.0 + 16.0);
        assert_eq!(sobolev_multiplier([1.0, 1.0, 1.0], 1), 4.0);
        assert_eq!(sobolev_multiplier([3.0, 1.0, 0.0], -1), 0.0);
        assert_eq!(multi_indices(0, 4).len(), 35);
        assert_eq!(multi_indices(1, 4).len(), 34);
    }

    #[test]
    fn symmetrize_real_spectrum_is_noop() {
        let g = TorusGrid::new(8, 1.0, false).unwrap();
        let fft = Fft3::new(8);
        let f: Vec<f64> = (0..g.len()).map(|i| ((i * 31) % 17) as f64).collect();
        let fh = fft.forward_real(&f);
        let mut s = fh.clone();
        hermitian_symmetrize(&g, &mut s);
        for i in 0..g.len() {
            assert!((s[i] - fh[i]).norm() < 1e-10);
        }
    }
}
