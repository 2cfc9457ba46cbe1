//! Small dense complex linear algebra: the matrix exponential and 3x3 solves.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.data[i * n + l];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.data[l * n..(l + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        let n = self.n;
        (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

const SQUARING_THRESHOLD: f64 = 0.5;
const MAX_TAYLOR_TERMS: usize = 40;
const MAX_SQUARINGS: i32 = 1000;

/// `exp(M t)` by scaling and squaring with a truncated Taylor kernel.
///
/// The scaled matrix has 1-norm at most 1/2, where the series terms fall
/// below 1e-18 of the running sum after about 18 terms.
pub fn expm(m: &CMatrix, t: f64) -> Result<CMatrix> {
    let fail = |reason: &str| Error::Expm { reason: reason.to_string(), kmag: f64::NAN, t };
    if !t.is_finite() || !m.is_finite() {
        return Err(fail("non-finite input"));
    }
    let n = m.dim();
    let x = m.scale(t);
    let norm = x.norm1();
    let squarings = if norm > SQUARING_THRESHOLD {
        (norm / SQUARING_THRESHOLD).log2().ceil() as i32
    } else {
        0
    };
    if squarings > MAX_SQUARINGS {
        return Err(fail("norm too large to scale"));
    }
    let x = x.scale(0.5f64.powi(squarings));

    let mut sum = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for j in 1..=MAX_TAYLOR_TERMS {
        term = term.matmul(&x).scale(1.0 / j as f64);
        sum = sum.add(&term);
        if term.norm1() <= 1e-18 * sum.norm1() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
        if !sum.is_finite() {
            return Err(fail("overflow during squaring"));
        }
    }
    if !sum.is_finite() {
        return Err(fail("non-finite result"));
    }
    Ok(sum)
}

pub type Mat3 = [[Complex64; 3]; 3];

pub fn det3(a: &Mat3) -> Complex64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Gaussian elimination with partial pivoting. `None` when a pivot vanishes.
pub fn solve3(a: &Mat3, b: [Complex64; 3]) -> Option<[Complex64; 3]> {
    let mut m = *a;
    let mut r = b;
    for col in 0..3 {
        let p = (col..3).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))?;
        if m[p][col].norm() == 0.0 {
            return None;
        }
        m.swap(col, p);
        r.swap(col, p);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for c in col..3 {
                let v = m[col][c];
                m[row][c] -= f * v;
            }
            let v = r[col];
            r[row] -= f * v;
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); 3];
    for row in (0..3).rev() {
        let mut acc = r[row];
        for c in row + 1..3 {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

pub fn matmul3(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|l| a[i][l] * b[l][j]).sum();
        }
    }
    out
}

pub fn matvec3(a: &Mat3, v: &[Complex64; 3]) -> [Complex64; 3] {
    [0, 1, 2].map(|i| a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> CMatrix {
        CMatrix::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
    }

    #[test]
    fn zero_and_diagonal() {
        let e = expm(&CMatrix::zeros(5), 3.0).unwrap();
        assert_eq!(e, CMatrix::identity(5));
        let d = CMatrix::identity(4).scale(-1.0);
        let e = expm(&d, 1.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { (-1f64).exp() } else { 0.0 };
                assert!((e[(i, j)] - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn inverse_identity_random_11() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = random_matrix(11, 1.0, &mut rng);
            let t = rng.gen_range(0.1..3.0);
            let p = expm(&m, t).unwrap().matmul(&expm(&m, -t).unwrap());
            assert!(p.sub(&CMatrix::identity(11)).max_abs() < 1e-10);
        }
    }

    #[test]
    fn rotation_generator() {
        // exp of [[0, w], [-w, 0]] is a rotation by w t
        let w = 7.3;
        let m = CMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 1) => c(w, 0.0),
            (1, 0) => c(-w, 0.0),
            _ => c(0.0, 0.0),
        });
        let t = 9.0;
        let e = expm(&m, t).unwrap();
        assert!((e[(0, 0)].re - (w * t).cos()).abs() < 1e-12);
        assert!((e[(0, 1)].re - (w * t).sin()).abs() < 1e-12);
    }

    #[test]
    fn semigroup_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_matrix(6, 0.7, &mut rng).sub(&CMatrix::identity(6).scale(2.0));
        let a = expm(&m, 1.3).unwrap().matmul(&expm(&m, 2.1).unwrap());
        let b = expm(&m, 3.4).unwrap();
        assert!(a.sub(&b).max_abs() < 1e-12 * b.max_abs().max(1.0));
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = CMatrix::identity(3);
        m[(1, 2)] = c(f64::NAN, 0.0);
        assert!(expm(&m, 1.0).is_err());
        assert!(expm(&CMatrix::identity(3), 1e308).is_err());
    }

    #[test]
    fn solve3_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a: Mat3 = [0, 1, 2].map(|_| [0, 1, 2].map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
            let x = [0, 1, 2].map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let b = matvec3(&a, &x);
            let y = solve3(&a, b).unwrap();
            for i in 0..3 {
                assert!((x[i] - y[i]).norm() < 1e-9 / det3(&a).norm().min(1.0));
            }
        }
        let singular = [[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]; 3];
        assert!(solve3(&singular, [c(1.0, 0.0); 3]).is_none());
    }
}
