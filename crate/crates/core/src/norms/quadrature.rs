//! Gauss-Legendre quadrature on dyadic panels of `(0, kmax]`.

use std::sync::OnceLock;

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn rule(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static GL32: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL64: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match n {
        32 => GL32.get_or_init(|| gauss_legendre(32)),
        64 => GL64.get_or_init(|| gauss_legendre(64)),
        _ => unreachable!("only 32- and 64-point rules are cached"),
    }
}

/// Quadrature controls.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Dyadic levels below `kmax`; the innermost panel is `[0, kmax 2^-levels]`.
    pub levels: u32,
    /// Accept a panel when every channel's GL64-GL32 gap is below `rtol` of that channel's total.
    pub rtol: f64,
    pub max_depth: u32,
    /// Equal sub-panels per dyadic panel.
    pub subdivide: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { levels: 24, rtol: 1e-13, max_depth: 10, subdivide: 1 }
    }
}

fn panel(f: &dyn Fn(f64, &mut [f64]), a: f64, b: f64, nchan: usize, n: usize, buf: &mut [f64]) -> Vec<f64> {
    let (x, w) = rule(n);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = vec![0.0; nchan];
    for (xi, wi) in x.iter().zip(w) {
        f(mid + half * xi, buf);
        for c in 0..nchan {
            acc[c] += wi * half * buf[c];
        }
    }
    acc
}

/// Panel boundaries `0, kmax 2^-levels, ..., kmax/2, kmax`.
pub fn dyadic_panels(kmax: f64, levels: u32) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, kmax * 0.5f64.powi(levels as i32))];
    for j in (0..levels).rev() {
        out.push((kmax * 0.5f64.powi(j as i32 + 1), kmax * 0.5f64.powi(j as i32)));
    }
    out
}

/// `int_0^kmax f_c(k) dk` for every channel `c` of a vector integrand.
///
/// `f(k, out)` writes all `nchan` channel values at `k`, so channels share
/// node evaluations. Panels whose 64- and 32-point estimates disagree are
/// bisected. Summation runs over panels in ascending `k`.
pub fn integrate_channels(f: &(dyn Fn(f64, &mut [f64]) + Sync), nchan: usize, kmax: f64, opts: QuadOptions) -> Vec<f64> {
    let mut buf = vec![0.0; nchan];
    let sub = opts.subdivide.max(1);
    let panels: Vec<(f64, f64)> = dyadic_panels(kmax, opts.levels)
        .into_iter()
        .flat_map(|(a, b)| {
            let h = (b - a) / sub as f64;
            (0..sub).map(move |i| (a + i as f64 * h, if i + 1 == sub { b } else { a + (i + 1) as f64 * h }))
        })
        .collect();
    let first: Vec<(Vec<f64>, Vec<f64>)> = panels
        .iter()
        .map(|&(a, b)| (panel(f, a, b, nchan, 64, &mut buf), panel(f, a, b, nchan, 32, &mut buf)))
        .collect();
    let mut total = vec![0.0; nchan];
    for (hi, _) in &first {
        for c in 0..nchan {
            total[c] += hi[c].abs();
        }
    }
    let tol: Vec<f64> = total.iter().map(|t| opts.rtol * t).collect();

    fn refine(
        f: &dyn Fn(f64, &mut [f64]),
        a: f64,
        b: f64,
        hi: Vec<f64>,
        lo: &[f64],
        tol: &[f64],
        depth: u32,
        nchan: usize,
        buf: &mut [f64],
    ) -> Vec<f64> {
        let ok = hi.iter().zip(lo).zip(tol).all(|((h, l), t)| (h - l).abs() <= *t);
        if ok || depth == 0 {
            return hi;
        }
        let m = 0.5 * (a + b);
        let mut out = vec![0.0; nchan];
        for (x, y) in [(a, m), (m, b)] {
            let h = panel(f, x, y, nchan, 64, buf);
            let l = panel(f, x, y, nchan, 32, buf);
            let sub = refine(f, x, y, h, &l, tol, depth - 1, nchan, buf);
            for c in 0..nchan {
                out[c] += sub[c];
            }
        }
        out
    }

    let mut out = vec![0.0; nchan];
    for ((a, b), (hi, lo)) in panels.into_iter().zip(first) {
        let v = refine(f, a, b, hi, &lo, &tol, opts.max_depth, nchan, &mut buf);
        for c in 0..nchan {
            out[c] += v[c];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials() {
        for n in [32, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            for p in 0..(2 * n as i32 - 1).min(40) {
                let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(p)).sum();
                let want = if p % 2 == 0 { 2.0 / (p + 1) as f64 } else { 0.0 };
                assert!((got - want).abs() < 1e-13, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn gaussian_moment() {
        // int_0^inf k^2 e^{-2k^2} dk = sqrt(pi/2)/8
        let f = |k: f64, out: &mut [f64]| {
            out[0] = k * k * (-2.0 * k * k).exp();
            out[1] = (-k).exp();
        };
        let v = integrate_channels(&f, 2, 12.0, QuadOptions::default());
        let want = (std::f64::consts::PI / 2.0).sqrt() / 8.0;
        assert!((v[0] - want).abs() < 1e-14);
        assert!((v[1] - (1.0 - (-12f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn panels_tile_interval() {
        let p = dyadic_panels(12.0, 24);
        assert_eq!(p.len(), 25);
        assert_eq!(p[0].0, 0.0);
        assert_eq!(p.last().unwrap().1, 12.0);
        for w in p.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
    }
}
