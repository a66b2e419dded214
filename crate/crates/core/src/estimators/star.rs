use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{check_n_paths, parallel_map, EstimatorResult, PerPathRecord, RunMetadata, Stopwatch};
use crate::error::{Error, Result};
use crate::geometry::{
    directional_max, polygon_area, polygon_perimeter, radial_profile, HullAccumulator,
    PolygonalPath,
};
use crate::sampling::{sample_bm_until_disk_exit, SimulationConfig};

/// Riemann sum `(1/2) Σ r(θ_k)² Δθ` over `m` equally spaced directions,
/// with the largest `r(θ_k)`.
pub fn star_area_of_path(path: &PolygonalPath, m_directions: usize) -> (f64, f64) {
    let r = radial_profile(path, m_directions);
    let dtheta = 2.0 * PI / m_directions as f64;
    let sum_sq: f64 = r.iter().map(|x| x * x).sum();
    let max = r.iter().copied().fold(0.0, f64::max);
    (0.5 * sum_sq * dtheta, max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarRun {
    pub records: Vec<PerPathRecord>,
    pub n_capped: usize,
    pub m_directions: usize,
    pub metadata: RunMetadata,
}

fn star_record(
    config: &SimulationConfig,
    stream_id: u64,
    m_directions: usize,
    acc: &mut HullAccumulator,
) -> PerPathRecord {
    let sample = sample_bm_until_disk_exit(config, stream_id);
    let (star, r_max) = star_area_of_path(&sample.path, m_directions);
    acc.clear();
    for &p in sample.path.vertices() {
        acc.push(p);
    }
    let hull = acc.finish();
    let (m, idx) = directional_max(0.0, &sample.path);
    PerPathRecord {
        stream_id,
        perimeter: polygon_perimeter(&hull),
        convex_area: polygon_area(&hull),
        star_area: Some(star),
        star_max_radius: Some(r_max),
        m_sample: m,
        y_at_argmax: sample.path.vertices()[idx].y,
        n_steps: sample.n_steps,
        capped: sample.capped,
    }
}

/// Stores each trajectory, then evaluates both its star hull (radial Riemann
/// sum) and its convex hull.
pub fn simulate_star(
    config: &SimulationConfig,
    n_paths: usize,
    m_directions: usize,
    workers: usize,
) -> Result<StarRun> {
    config.validate()?;
    check_n_paths(n_paths, 2, "star-hull simulation")?;
    if m_directions < 8 {
        return Err(Error::InvalidInput(format!(
            "m_directions must be at least 8, got {m_directions}"
        )));
    }
    let clock = Stopwatch::start();
    let records = parallel_map(n_paths, workers, HullAccumulator::default, |acc, id| {
        star_record(config, id, m_directions, acc)
    })?;
    let n_capped = records.iter().filter(|r| r.capped).count();
    let mut metadata = RunMetadata::for_paths("star-area", config, n_paths, workers);
    metadata.m_directions = Some(m_directions);
    metadata.wall_time_s = clock.seconds();
    Ok(StarRun {
        records,
        n_capped,
        m_directions,
        metadata,
    })
}

pub fn star_area_estimate(run: &StarRun) -> Result<EstimatorResult> {
    let values: Vec<f64> = run
        .records
        .iter()
        .filter(|r| !r.capped)
        .filter_map(|r| r.star_area)
        .collect();
    if values.is_empty() {
        return Err(Error::EstimationFailed("star-area: no uncapped paths".into()));
    }
    EstimatorResult::from_values(&values, run.n_capped, run.metadata.clone())
}

pub fn estimate_star_area(
    config: &SimulationConfig,
    n_paths: usize,
    m_directions: usize,
    workers: usize,
) -> Result<EstimatorResult> {
    check_n_paths(n_paths, 100, "estimate_star_area")?;
    star_area_estimate(&simulate_star(config, n_paths, m_directions, workers)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub n_checked: usize,
    pub m_directions: usize,
    /// Largest `star − convex − slack`; non-positive when nothing is violated.
    pub max_excess: f64,
    pub mean_star: f64,
    pub mean_convex: f64,
}

/// Per-path `star_area ≤ convex_area + (1/2)(2π/m) max r²`.
pub fn inclusion_check(records: &[PerPathRecord], m_directions: usize) -> Result<InclusionReport> {
    if m_directions == 0 {
        return Err(Error::InvalidInput("m_directions must be positive".into()));
    }
    let dtheta = 2.0 * PI / m_directions as f64;
    let mut max_excess = f64::NEG_INFINITY;
    let (mut sum_star, mut sum_convex) = (0.0, 0.0);
    let mut n = 0usize;
    for r in records.iter().filter(|r| !r.capped) {
        let (Some(star), Some(r_max)) = (r.star_area, r.star_max_radius) else {
            return Err(Error::InvalidInput(format!(
                "record for stream {} carries no star area",
                r.stream_id
            )));
        };
        let slack = 0.5 * dtheta * r_max * r_max;
        let excess = star - r.convex_area - slack;
        if excess > 0.0 {
            return Err(Error::InvariantViolation {
                stream_id: r.stream_id,
                detail: format!(
                    "star area {star} exceeds convex area {} by more than slack {slack}",
                    r.convex_area
                ),
            });
        }
        max_excess = max_excess.max(excess);
        sum_star += star;
        sum_convex += r.convex_area;
        n += 1;
    }
    if n == 0 {
        return Err(Error::InvalidInput("no uncapped records to check".into()));
    }
    Ok(InclusionReport {
        n_checked: n,
        m_directions,
        max_excess,
        mean_star: sum_star / n as f64,
        mean_convex: sum_convex / n as f64,
    })
}
