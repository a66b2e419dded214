use serde::{Deserialize, Serialize};

use super::convex::{simulate_convex, ConvexRun};
use super::stats::{ks_distance, SampleSummary};
use super::{check_n_paths, EstimatorResult, RunMetadata};
use crate::analytic::cdf_m;
use crate::error::Result;
use crate::sampling::SimulationConfig;

/// Row of the empirical-versus-exact CDF table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfRow {
    pub a: f64,
    pub empirical: f64,
    pub analytic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalLaw {
    /// Sorted `M` samples clipped to `[0, 1]`.
    pub samples: Vec<f64>,
    pub ks_distance: f64,
    pub table: Vec<CdfRow>,
    /// Empirical `P(M ≥ 1/2)` and its binomial standard error.
    pub p_m_ge_half: f64,
    pub p_m_ge_half_se: f64,
    pub mean_m: EstimatorResult,
    pub n_capped_excluded: usize,
    pub metadata: RunMetadata,
}

pub fn empirical_law_from_run(run: &ConvexRun) -> Result<EmpiricalLaw> {
    let raw: Vec<f64> = run.usable().map(|r| r.m_sample).collect();
    let summary = SampleSummary::from_values(&raw)?;
    let mut samples: Vec<f64> = raw.iter().map(|m| m.clamp(0.0, 1.0)).collect();
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;

    let ks = ks_distance(&samples, |x| cdf_m(x).expect("clipped to [0, 1]"));
    let table = (1..100)
        .map(|i| {
            let a = i as f64 / 100.0;
            let below = samples.partition_point(|&m| m < a);
            CdfRow {
                a,
                empirical: below as f64 / n,
                analytic: cdf_m(a).expect("grid inside (0, 1)"),
            }
        })
        .collect();
    let above_half = samples.len() - samples.partition_point(|&m| m < 0.5);
    let p = above_half as f64 / n;

    let mut metadata = run.metadata.clone();
    metadata.estimator = "empirical-law-of-m".to_string();
    Ok(EmpiricalLaw {
        ks_distance: ks,
        table,
        p_m_ge_half: p,
        p_m_ge_half_se: (p * (1.0 - p) / n).sqrt(),
        mean_m: EstimatorResult {
            mean: summary.mean,
            std_error: summary.std_error,
            n_samples: summary.n_samples,
            ci95: summary.ci95,
            n_capped_excluded: run.n_capped,
            metadata: metadata.clone(),
        },
        samples,
        n_capped_excluded: run.n_capped,
        metadata,
    })
}

pub fn empirical_law_of_m(config: &SimulationConfig, n_paths: usize, workers: usize) -> Result<EmpiricalLaw> {
    check_n_paths(n_paths, 1000, "empirical_law_of_m")?;
    empirical_law_from_run(&simulate_convex(config, n_paths, workers)?)
}
