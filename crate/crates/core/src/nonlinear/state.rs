use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Fft3, TorusGrid};

pub const FIELD_NAMES: [&str; 16] = [
    "rho_e", "u_e_x", "u_e_y", "u_e_z", "theta_e", "rho_i", "u_i_x", "u_i_y", "u_i_z", "theta_i", "E_x", "E_y", "E_z",
    "B_x", "B_y", "B_z",
];

/// Perturbation fields `n = 1 + rho`, `theta = 1 + Theta` of both species plus `E`, `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusState {
    pub grid: TorusGrid,
    pub time: f64,
    pub rho_e: Vec<f64>,
    pub u_e: [Vec<f64>; 3],
    pub theta_e: Vec<f64>,
    pub rho_i: Vec<f64>,
    pub u_i: [Vec<f64>; 3],
    pub theta_i: Vec<f64>,
    pub e: [Vec<f64>; 3],
    pub b: [Vec<f64>; 3],
}

fn vec3(n: usize) -> [Vec<f64>; 3] {
    [vec![0.0; n], vec![0.0; n], vec![0.0; n]]
}

impl TorusState {
    pub fn zeros(grid: TorusGrid) -> Self {
        let n = grid.len();
        Self {
            grid,
            time: 0.0,
            rho_e: vec![0.0; n],
            u_e: vec3(n),
            theta_e: vec![0.0; n],
            rho_i: vec![0.0; n],
            u_i: vec3(n),
            theta_i: vec![0.0; n],
            e: vec3(n),
            b: vec3(n),
        }
    }

    /// Fields in [`FIELD_NAMES`] order.
    pub fn fields(&self) -> [&[f64]; 16] {
        [
            &self.rho_e, &self.u_e[0], &self.u_e[1], &self.u_e[2], &self.theta_e, &self.rho_i, &self.u_i[0],
            &self.u_i[1], &self.u_i[2], &self.theta_i, &self.e[0], &self.e[1], &self.e[2], &self.b[0], &self.b[1],
            &self.b[2],
        ]
    }

    pub fn fields_mut(&mut self) -> [&mut Vec<f64>; 16] {
        let [uex, uey, uez] = &mut self.u_e;
        let [uix, uiy, uiz] = &mut self.u_i;
        let [ex, ey, ez] = &mut self.e;
        let [bx, by, bz] = &mut self.b;
        [
            &mut self.rho_e, uex, uey, uez, &mut self.theta_e, &mut self.rho_i, uix, uiy, uiz, &mut self.theta_i, ex,
            ey, ez, bx, by, bz,
        ]
    }

    pub fn from_fields(grid: TorusGrid, time: f64, fields: Vec<Vec<f64>>) -> Result<Self> {
        if fields.len() != 16 {
            return Err(Error::DimensionMismatch { expected: 16, got: fields.len() });
        }
        let mut s = Self::zeros(grid);
        for (dst, src) in s.fields_mut().into_iter().zip(fields) {
            grid.check_len(src.len())?;
            *dst = src;
        }
        s.time = time;
        Ok(s)
    }

    pub fn check_dims(&self) -> Result<()> {
        for f in self.fields() {
            self.grid.check_len(f.len())?;
        }
        Ok(())
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let mut s = self.clone();
        for f in s.fields_mut() {
            f.iter_mut().for_each(|x| *x *= lambda);
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.fields().iter().flat_map(|f| f.iter()).fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `1 + rho > 0` and `1 + Theta > 0` for both species.
    pub fn check_positivity(&self) -> Result<()> {
        let checks: [(&'static str, &[f64]); 4] =
            [("rho_e", &self.rho_e), ("theta_e", &self.theta_e), ("rho_i", &self.rho_i), ("theta_i", &self.theta_i)];
        check_positive(&self.grid, &checks, self.time)
    }
}

pub(crate) fn check_positive(grid: &TorusGrid, checks: &[(&'static str, &[f64])], time: f64) -> Result<()> {
    for (field, f) in checks {
        for (idx, &x) in f.iter().enumerate() {
            if !(1.0 + x > 0.0) {
                return Err(Error::Positivity { field, value: 1.0 + x, index: grid.unflatten(idx), time });
            }
        }
    }
    Ok(())
}

/// Physical half-difference and half-sum fields.
///
/// `u1 = (rho_1, u_1x, u_1y, u_1z, Theta_1, E_x, E_y, E_z, B_x, B_y, B_z)` and
/// `u2 = (rho_2, u_2x, u_2y, u_2z, Theta_2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumDiff {
    pub u1: Vec<Vec<f64>>,
    pub u2: Vec<Vec<f64>>,
}

fn half_diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x - y)).collect()
}

fn half_sum(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

pub fn to_sum_diff(s: &TorusState) -> SumDiff {
    let mut u1 = vec![half_diff(&s.rho_e, &s.rho_i)];
    let mut u2 = vec![half_sum(&s.rho_e, &s.rho_i)];
    for j in 0..3 {
        u1.push(half_diff(&s.u_e[j], &s.u_i[j]));
        u2.push(half_sum(&s.u_e[j], &s.u_i[j]));
    }
    u1.push(half_diff(&s.theta_e, &s.theta_i));
    u2.push(half_sum(&s.theta_e, &s.theta_i));
    u1.extend(s.e.iter().cloned());
    u1.extend(s.b.iter().cloned());
    SumDiff { u1, u2 }
}

pub fn from_sum_diff(grid: TorusGrid, time: f64, sd: &SumDiff) -> TorusState {
    let plus = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<f64>>();
    let minus = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| y - x).collect::<Vec<f64>>();
    let (d, s) = (&sd.u1, &sd.u2);
    TorusState {
        grid,
        time,
        rho_e: plus(&d[0], &s[0]),
        u_e: [plus(&d[1], &s[1]), plus(&d[2], &s[2]), plus(&d[3], &s[3])],
        theta_e: plus(&d[4], &s[4]),
        rho_i: minus(&d[0], &s[0]),
        u_i: [minus(&d[1], &s[1]), minus(&d[2], &s[2]), minus(&d[3], &s[3])],
        theta_i: minus(&d[4], &s[4]),
        e: [d[5].clone(), d[6].clone(), d[7].clone()],
        b: [d[8].clone(), d[9].clone(), d[10].clone()],
    }
}

/// `(||div E - rho_i + rho_e||, ||div B||)` in continuum `L^2`.
pub fn constraint_residual(s: &TorusState) -> Result<(f64, f64)> {
    s.check_dims()?;
    let fft = Fft3::new(s.grid.n);
    let rho1: Vec<f64> = half_diff(&s.rho_e, &s.rho_i);
    let r = fft.forward_real(&rho1);
    let e = [0, 1, 2].map(|j| fft.forward_real(&s.e[j]));
    let b = [0, 1, 2].map(|j| fft.forward_real(&s.b[j]));
    Ok(constraint_residual_spectral(&s.grid, &r, &e, &b))
}

pub(crate) fn constraint_residual_spectral(
    grid: &TorusGrid,
    rho1: &[Complex64],
    e: &[Vec<Complex64>; 3],
    b: &[Vec<Complex64>; 3],
) -> (f64, f64) {
    let i = Complex64::new(0.0, 1.0);
    let (mut g, mut d) = (0.0, 0.0);
    for idx in 0..grid.len() {
        let k = grid.kvec_deriv(idx);
        let dive = i * (k[0] * e[0][idx] + k[1] * e[1][idx] + k[2] * e[2][idx]);
        let divb = i * (k[0] * b[0][idx] + k[1] * b[1][idx] + k[2] * b[2][idx]);
        g += (dive + 2.0 * rho1[idx]).norm_sqr();
        d += divb.norm_sqr();
    }
    let w = grid.spectral_weight();
    ((g * w).sqrt(), (d * w).sqrt())
}
