//! Whole-space norms of isotropic linear solutions by radial quadrature.
//!
//! With `f^(k) = int e^{-i x.k} f(x) dx`, Plancherel gives
//! `||f||^2 = (2 pi)^-3 int |f^|^2 dk`, and for a radial amplitude this is
//! `(2 pi)^-3 int_0^kmax 4 pi k^2 pf |m(k)|^2 dk` where `pf` counts the
//! polarization directions carried by the channel.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::quadrature::{integrate_channels, QuadOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Scalar,
    Longitudinal,
    /// Both directions orthogonal to `k` carry the amplitude.
    Transverse,
}

impl Polarization {
    pub fn factor(self) -> f64 {
        match self {
            Polarization::Transverse => 2.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayHint {
    Exponential,
    Gaussian,
}

pub const DEFAULT_KMAX: f64 = 12.0;
const TAIL_TOL: f64 = 1e-14;

type Amplitude = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Radial Fourier amplitude `g(|k|)` of some initial channel.
#[derive(Clone)]
pub struct RadialProfile {
    pub name: String,
    pub polarization: Polarization,
    pub kmax: f64,
    pub decay_hint: DecayHint,
    g: Amplitude,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("name", &self.name)
            .field("polarization", &self.polarization)
            .field("kmax", &self.kmax)
            .field("decay_hint", &self.decay_hint)
            .finish()
    }
}

impl RadialProfile {
    pub fn new(
        name: impl Into<String>,
        g: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        polarization: Polarization,
        kmax: f64,
        decay_hint: DecayHint,
    ) -> Result<Self> {
        let name = name.into();
        if !(kmax.is_finite() && kmax > 0.0) {
            return Err(Error::TailBound { name, tail: f64::NAN, integral: f64::NAN, kmax });
        }
        Ok(Self { name, polarization, kmax, decay_hint, g: Arc::new(g) })
    }

    /// `e^{-|k|^2}` truncated at the default radius.
    pub fn gaussian(name: impl Into<String>, polarization: Polarization) -> Self {
        Self::new(name, |k| Complex64::new((-k * k).exp(), 0.0), polarization, DEFAULT_KMAX, DecayHint::Gaussian)
            .expect("default radius is valid")
    }

    pub fn exponential(name: impl Into<String>, polarization: Polarization, kmax: f64) -> Result<Self> {
        Self::new(name, |k| Complex64::new((-k).exp(), 0.0), polarization, kmax, DecayHint::Exponential)
    }

    pub fn zero(name: impl Into<String>, polarization: Polarization) -> Self {
        Self::new(name, |_| Complex64::new(0.0, 0.0), polarization, DEFAULT_KMAX, DecayHint::Gaussian)
            .expect("default radius is valid")
    }

    #[inline]
    pub fn amplitude(&self, k: f64) -> Complex64 {
        (self.g)(k)
    }

    /// Tail of `k^{2+2m} |g|^p`, `p = 1, 2`, beyond `kmax` relative to the bulk.
    pub fn check_tail(&self, order: u32) -> Result<()> {
        let m = order as i32;
        let f = |k: f64, out: &mut [f64]| {
            let a = self.amplitude(k).norm();
            out[0] = k.powi(2 + 2 * m) * a * a;
            out[1] = k.powi(2 + m) * a;
        };
        let opts = QuadOptions { levels: 6, ..QuadOptions::default() };
        let bulk = integrate_channels(&f, 2, self.kmax, opts);
        // tail over [kmax, 8 kmax]
        let shifted = |k: f64, out: &mut [f64]| f(self.kmax + k, out);
        let tail = integrate_channels(&shifted, 2, 7.0 * self.kmax, QuadOptions { levels: 8, ..opts });
        for c in 0..2 {
            if !(tail[c] <= TAIL_TOL * bulk[c]) && tail[c] > 0.0 {
                return Err(Error::TailBound { name: self.name.clone(), tail: tail[c], integral: bulk[c], kmax: self.kmax });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// `||D^m f||_{L^2}` via Plancherel.
    L2,
    /// `(2 pi)^-3 ||k^m f^||_{L^1}`, an upper bound for `||D^m f||_{L^inf}`.
    L1Hat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub order: u32,
    pub kind: NormKind,
    pub pf: f64,
}

impl ChannelSpec {
    pub fn l2(order: u32, pol: Polarization) -> Self {
        Self { order, kind: NormKind::L2, pf: pol.factor() }
    }

    pub fn l1hat(order: u32, pol: Polarization) -> Self {
        Self { order, kind: NormKind::L1Hat, pf: pol.factor() }
    }
}

/// Several radial norms sharing node evaluations.
///
/// `amp(k, out)` writes the modal amplitude `m_c(k)` for every channel.
pub fn radial_norms(
    kmax: f64,
    specs: &[ChannelSpec],
    amp: &(dyn Fn(f64, &mut [Complex64]) + Sync),
    opts: QuadOptions,
) -> Vec<f64> {
    let n = specs.len();
    let f = |k: f64, out: &mut [f64]| {
        let mut a = vec![Complex64::new(0.0, 0.0); n];
        amp(k, &mut a);
        for (c, s) in specs.iter().enumerate() {
            let w = 4.0 * PI * k * k;
            out[c] = match s.kind {
                NormKind::L2 => w * s.pf * k.powi(2 * s.order as i32) * a[c].norm_sqr(),
                NormKind::L1Hat => w * s.pf.sqrt() * k.powi(s.order as i32) * a[c].norm(),
            };
        }
    };
    let raw = integrate_channels(&f, n, kmax, opts);
    let c3 = (2.0 * PI).powi(-3);
    raw.iter()
        .zip(specs)
        .map(|(v, s)| match s.kind {
            NormKind::L2 => (c3 * v).max(0.0).sqrt(),
            NormKind::L1Hat => c3 * v,
        })
        .collect()
}

fn single(profile: &RadialProfile, spec: ChannelSpec, evolve: &(dyn Fn(f64, Complex64) -> Complex64 + Sync)) -> Result<f64> {
    profile.check_tail(spec.order)?;
    let amp = |k: f64, out: &mut [Complex64]| out[0] = evolve(k, profile.amplitude(k));
    Ok(radial_norms(profile.kmax, &[spec], &amp, QuadOptions::default())[0])
}

/// `||m(t)||_{L^2}` where `evolve(|k|, g(|k|))` returns the amplitude at time `t`.
pub fn radial_l2_norm(profile: &RadialProfile, evolve: &(dyn Fn(f64, Complex64) -> Complex64 + Sync)) -> Result<f64> {
    single(profile, ChannelSpec::l2(0, profile.polarization), evolve)
}

/// `||D^m m(t)||_{L^2}`, weight `|k|^{2m}`.
pub fn radial_sobolev_seminorm(
    profile: &RadialProfile,
    order: u32,
    evolve: &(dyn Fn(f64, Complex64) -> Complex64 + Sync),
) -> Result<f64> {
    single(profile, ChannelSpec::l2(order, profile.polarization), evolve)
}

pub fn radial_l1hat_bound(profile: &RadialProfile, evolve: &(dyn Fn(f64, Complex64) -> Complex64 + Sync)) -> Result<f64> {
    single(profile, ChannelSpec::l1hat(0, profile.polarization), evolve)
}

/// Identity map: the norm of the profile itself.
pub fn at_rest(_k: f64, g: Complex64) -> Complex64 {
    g
}
