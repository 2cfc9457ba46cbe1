//! Sobolev norms of periodic fields through discrete Fourier multipliers.

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::{sobolev_multiplier, Fft3, TorusGrid};

/// `sqrt(sum_k m_s(k) |f^(k)|^2 vol / N^6)`, summed in ascending flattened index.
pub fn torus_sobolev_norm_spectral(grid: &TorusGrid, fhat: &[Complex64], s: i32) -> Result<f64> {
    grid.check_len(fhat.len())?;
    let mut acc = 0.0;
    for (idx, z) in fhat.iter().enumerate() {
        acc += sobolev_multiplier(grid.kvec(idx), s) * z.norm_sqr();
    }
    Ok((acc * grid.spectral_weight()).sqrt())
}

pub fn torus_sobolev_norm(grid: &TorusGrid, fft: &Fft3, field: &[f64], s: i32) -> Result<f64> {
    grid.check_len(field.len())?;
    torus_sobolev_norm_spectral(grid, &fft.forward_real(field), s)
}

/// Physical-space `L^2` norm, the Parseval counterpart of `s = 0`.
pub fn torus_l2_direct(grid: &TorusGrid, field: &[f64]) -> Result<f64> {
    grid.check_len(field.len())?;
    let cell = grid.dx().powi(3);
    Ok((field.iter().map(|x| x * x).sum::<f64>() * cell).sqrt())
}

/// `||U||_s + ||U||_{L^1}` for a stack of fields, with the pointwise Euclidean
/// norm of the stack inside the `L^1` integral.
pub fn omega_measure(grid: &TorusGrid, fft: &Fft3, fields: &[&[f64]], s: i32) -> Result<f64> {
    let mut hs2 = 0.0;
    for f in fields {
        hs2 += torus_sobolev_norm(grid, fft, f, s)?.powi(2);
    }
    let cell = grid.dx().powi(3);
    let mut l1 = 0.0;
    for idx in 0..grid.len() {
        l1 += fields.iter().map(|f| f[idx] * f[idx]).sum::<f64>().sqrt();
    }
    Ok(hs2.sqrt() + l1 * cell)
}
