//! Time series and least-squares decay-rate fits.

use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_FIT_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), got: values.len() });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::UnsortedTimes(label));
        }
        Ok(Self { label, times, values })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Samples with `lo <= t <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied()).filter(move |(t, _)| *t >= lo && *t <= hi)
    }

    pub fn value_at(&self, t: f64) -> Option<f64> {
        self.times.iter().position(|&x| x == t).map(|i| self.values[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayModel {
    /// `log v` against `log(1 + t)`.
    Powerlaw,
    /// `log v` against `t`.
    Exponential,
}

impl std::str::FromStr for DecayModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "powerlaw" => Ok(Self::Powerlaw),
            "exponential" => Ok(Self::Exponential),
            _ => Err(Error::Config { key: "model".into(), msg: format!("expected powerlaw or exponential, got `{s}`") }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    /// Range of the samples actually used.
    pub window: (f64, f64),
    pub samples: usize,
    pub model: DecayModel,
}

impl DecayFit {
    pub fn within(&self, target: f64, tol: f64) -> bool {
        (self.slope - target).abs() <= tol
    }
}

/// Ordinary least squares on the samples inside `[lo, hi]`.
pub fn fit_decay(series: &TimeSeries, window: (f64, f64), model: DecayModel) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series.window(window.0, window.1).collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_FIT_SAMPLES, found: pts.len() });
    }
    if let Some(&(time, value)) = pts.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositive { label: series.label.clone(), value, time });
    }
    let xs: Vec<f64> = pts
        .iter()
        .map(|(t, _)| match model {
            DecayModel::Powerlaw => t.ln_1p(),
            DecayModel::Exponential => *t,
        })
        .collect();
    let ys: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (rss / (n - 2.0) / sxx).sqrt();
    Ok(DecayFit {
        slope,
        stderr,
        intercept,
        window: (pts[0].0, pts[pts.len() - 1].0),
        samples: pts.len(),
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::log_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_power_law() {
        let t = log_grid(50.0, 1000.0, 60);
        let v = t.iter().map(|t| (1.0 + t).powf(-0.75)).collect();
        let f = fit_decay(&TimeSeries::new("x", t, v).unwrap(), (50.0, 1000.0), DecayModel::Powerlaw).unwrap();
        assert!((f.slope + 0.75).abs() < 1e-10);
        assert!(f.stderr < 1e-9);
        assert_eq!(f.samples, 60);
    }

    #[test]
    fn exact_exponential() {
        let t: Vec<f64> = (0..60).map(|i| 2.0 + 18.0 * i as f64 / 59.0).collect();
        let v = t.iter().map(|t| (-t / 2.0).exp()).collect();
        let f = fit_decay(&TimeSeries::new("x", t, v).unwrap(), (2.0, 20.0), DecayModel::Exponential).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = log_grid(50.0, 1000.0, 60);
        let v = t.iter().map(|t| (1.0 + t).powf(-0.75) * (1.0 + 0.01 * rng.gen_range(-1.0..1.0))).collect();
        let f = fit_decay(&TimeSeries::new("x", t, v).unwrap(), (50.0, 1000.0), DecayModel::Powerlaw).unwrap();
        assert!((f.slope + 0.75).abs() < 0.02, "{}", f.slope);
    }

    #[test]
    fn errors() {
        let t = log_grid(1.0, 10.0, 12);
        let s = TimeSeries::new("x", t.clone(), vec![1.0; 12]).unwrap();
        assert!(matches!(fit_decay(&s, (5.0, 10.0), DecayModel::Powerlaw), Err(Error::TooFewSamples { .. })));
        let mut v = vec![1.0; 12];
        v[3] = 0.0;
        let s = TimeSeries::new("x", t, v).unwrap();
        assert!(matches!(fit_decay(&s, (0.0, 10.0), DecayModel::Powerlaw), Err(Error::NonPositive { .. })));
        assert!(matches!(TimeSeries::new("x", vec![1.0, 1.0], vec![1.0, 1.0]), Err(Error::UnsortedTimes(_))));
    }
}
