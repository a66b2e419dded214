use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = CompensatedSum::default();
    for x in xs {
        s.add(x);
    }
    s.value()
}

pub const CI_Z: f64 = 1.96;
pub const CI_METHOD: &str = "normal approximation, mean +/- 1.96 SE";

/// Mean, standard error and normal 95% interval of a sample, reduced in
/// index order so the result does not depend on how it was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub ci95: (f64, f64),
}

impl SampleSummary {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::EstimationFailed(format!(
                "need more than one usable sample, got {n}"
            )));
        }
        let mean = compensated_sum(values.iter().copied()) / n as f64;
        let ss = compensated_sum(values.iter().map(|&x| (x - mean) * (x - mean)));
        let std_error = (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt();
        Ok(SampleSummary {
            mean,
            std_error,
            n_samples: n,
            ci95: (mean - CI_Z * std_error, mean + CI_Z * std_error),
        })
    }
}

/// Kolmogorov–Smirnov distance between the empirical law of `sorted` and a
/// continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}
