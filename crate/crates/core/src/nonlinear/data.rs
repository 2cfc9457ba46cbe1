//! Random small initial data compatible with both divergence constraints.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::TorusState;
use crate::error::{Error, Result};
use crate::spectral::{apply_mask, hermitian_symmetrize, Fft3, TorusGrid};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataSpec {
    /// Largest pointwise magnitude over all sixteen fields.
    pub amplitude: f64,
    pub seed: u64,
    /// Modes with `0 < max_j |m_j| <= kcut` are excited.
    pub kcut: usize,
}

impl Default for DataSpec {
    fn default() -> Self {
        Self { amplitude: 1e-2, seed: 0, kcut: 2 }
    }
}

fn random_spectrum(grid: &TorusGrid, kcut: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut f = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (idx, z) in f.iter_mut().enumerate() {
        let m = grid.unflatten(idx).map(|i| grid.mode(i).unsigned_abs() as usize);
        let inf = m.into_iter().max().unwrap_or(0);
        if inf > 0 && inf <= kcut {
            *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    hermitian_symmetrize(grid, &mut f);
    f[0] = Complex64::new(0.0, 0.0);
    apply_mask(grid, &mut f);
    f
}

/// Remove the component of `v` along `k` mode by mode.
fn project_solenoidal(grid: &TorusGrid, v: &mut [Vec<Complex64>; 3]) {
    for idx in 0..grid.len() {
        let k = grid.kvec_deriv(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let p = (k[0] * v[0][idx] + k[1] * v[1][idx] + k[2] * v[2][idx]) / k2;
        for j in 0..3 {
            v[j][idx] -= p * k[j];
        }
    }
}

/// Zero-mean random data with `div E = rho_i - rho_e` and `div B = 0` built in.
pub fn well_prepared(grid: TorusGrid, spec: DataSpec) -> Result<TorusState> {
    if !(spec.amplitude.is_finite() && spec.amplitude >= 0.0) {
        return Err(Error::Config { key: "amplitude".into(), msg: format!("must be nonnegative, got {}", spec.amplitude) });
    }
    if spec.kcut == 0 || 3 * spec.kcut >= grid.n {
        return Err(Error::Config { key: "kcut".into(), msg: format!("must lie in 1..N/3, got {}", spec.kcut) });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let fft = Fft3::new(grid.n);
    let mut fluid: Vec<Vec<Complex64>> = (0..10).map(|_| random_spectrum(&grid, spec.kcut, &mut rng)).collect();
    let mut e = [0, 1, 2].map(|_| random_spectrum(&grid, spec.kcut, &mut rng));
    let mut b = [0, 1, 2].map(|_| random_spectrum(&grid, spec.kcut, &mut rng));
    project_solenoidal(&grid, &mut e);
    project_solenoidal(&grid, &mut b);

    // longitudinal E from i k . E = rho_i - rho_e
    for idx in 0..grid.len() {
        let k = grid.kvec_deriv(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let q = fluid[5][idx] - fluid[0][idx];
        if k2 == 0.0 {
            continue;
        }
        let phi = -I * q / k2;
        for j in 0..3 {
            e[j][idx] += phi * k[j];
        }
    }
    // mean of rho_i - rho_e is already zero; drop any Nyquist-only content
    for f in fluid.iter_mut().chain(e.iter_mut()).chain(b.iter_mut()) {
        f[0] = Complex64::new(0.0, 0.0);
    }

    let mut fields: Vec<Vec<f64>> = fluid.iter().map(|f| fft.inverse_real(f)).collect();
    fields.extend(e.iter().map(|f| fft.inverse_real(f)));
    fields.extend(b.iter().map(|f| fft.inverse_real(f)));
    let peak = fields.iter().flat_map(|f| f.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = if peak > 0.0 { spec.amplitude / peak } else { 0.0 };
    for f in fields.iter_mut() {
        f.iter_mut().for_each(|x| *x *= scale);
    }
    TorusState::from_fields(grid, 0.0, fields)
}
