//! Monte Carlo estimators for the hull functionals of killed Brownian motion.
//!
//! Every estimator is a map over stream ids followed by an in-order
//! reduction. Per-path work depends only on `(config, stream_id)` and the
//! reduction is compensated and sequential, so results are bit-identical for
//! any worker count.

mod convex;
mod lattice;
mod law;
mod star;
pub mod stats;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{BoundaryMode, SimulationConfig, GENERATOR};

pub use convex::{
    convex_area_blaschke_estimate, convex_area_direct_estimate, convex_record_from_path,
    estimate_convex_area_blaschke, estimate_convex_area_direct, estimate_perimeter,
    perimeter_estimate, simulate_convex, support_square_estimate, ConvexRun,
};
pub use lattice::{
    enclosed_area, estimate_topological_area, loop_twice_area, simulate_topological,
    trace_outer_boundary, TopologicalRun,
};
pub use law::{empirical_law_of_m, empirical_law_from_run, EmpiricalLaw};
pub use star::{
    estimate_star_area, inclusion_check, simulate_star, star_area_of_path, star_area_estimate,
    InclusionReport, StarRun,
};
pub use stats::{SampleSummary, CI_METHOD};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub estimator: String,
    pub master_seed: u64,
    pub dt: Option<f64>,
    pub boundary_mode: Option<BoundaryMode>,
    pub kill_radius: Option<u32>,
    pub m_directions: Option<usize>,
    pub n_requested: usize,
    pub workers: usize,
    pub generator: String,
    pub ci_method: String,
    pub wall_time_s: f64,
}

impl RunMetadata {
    fn for_paths(estimator: &str, config: &SimulationConfig, n: usize, workers: usize) -> Self {
        RunMetadata {
            estimator: estimator.to_string(),
            master_seed: config.master_seed,
            dt: Some(config.dt),
            boundary_mode: Some(config.boundary_mode),
            kill_radius: None,
            m_directions: None,
            n_requested: n,
            workers,
            generator: GENERATOR.to_string(),
            ci_method: CI_METHOD.to_string(),
            wall_time_s: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub ci95: (f64, f64),
    pub n_capped_excluded: usize,
    pub metadata: RunMetadata,
}

impl EstimatorResult {
    pub fn from_values(values: &[f64], n_capped: usize, metadata: RunMetadata) -> Result<Self> {
        let s = SampleSummary::from_values(values)?;
        Ok(EstimatorResult {
            mean: s.mean,
            std_error: s.std_error,
            n_samples: s.n_samples,
            ci95: s.ci95,
            n_capped_excluded: n_capped,
            metadata,
        })
    }

    pub fn summary(&self) -> SampleSummary {
        SampleSummary {
            mean: self.mean,
            std_error: self.std_error,
            n_samples: self.n_samples,
            ci95: self.ci95,
        }
    }
}

/// Per-trajectory functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerPathRecord {
    pub stream_id: u64,
    pub perimeter: f64,
    pub convex_area: f64,
    pub star_area: Option<f64>,
    /// `max_θk r(θ_k)` of the star hull, when computed.
    pub star_max_radius: Option<f64>,
    /// `h(0) = max_t X_t`.
    pub m_sample: f64,
    /// `h'(0) = Y_T` at the first maximizing sample.
    pub y_at_argmax: f64,
    pub n_steps: u64,
    pub capped: bool,
}

/// Maps `f` over stream ids `0..n` on a pool of `workers` threads. Output is
/// in stream order.
pub fn parallel_map<T, S, I, F>(n: usize, workers: usize, init: I, f: F) -> Result<Vec<T>>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, u64) -> T + Sync + Send,
{
    if workers == 0 {
        return Err(Error::InvalidInput("worker count must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        (0..n as u64)
            .into_par_iter()
            .map_init(&init, |state, id| f(state, id))
            .collect()
    }))
}

fn check_n_paths(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        return Err(Error::InvalidInput(format!("{what} needs at least {min} samples, got {n}")));
    }
    Ok(())
}

struct Stopwatch(Instant);

impl Stopwatch {
    fn start() -> Self {
        Stopwatch(Instant::now())
    }

    fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}
