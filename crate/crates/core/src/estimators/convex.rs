use std::f64::consts::PI;

use super::{check_n_paths, parallel_map, EstimatorResult, PerPathRecord, RunMetadata, Stopwatch};
use crate::error::{Error, Result};
use crate::geometry::{
    convex_hull, directional_max, polygon_area, polygon_perimeter, HullAccumulator, PolygonalPath,
};
use crate::sampling::{walk_bm_until_disk_exit, SimulationConfig};

/// Streamed convex-hull functionals for `n` trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexRun {
    pub records: Vec<PerPathRecord>,
    pub n_capped: usize,
    pub metadata: RunMetadata,
}

impl ConvexRun {
    pub fn usable(&self) -> impl Iterator<Item = &PerPathRecord> {
        self.records.iter().filter(|r| !r.capped)
    }

    fn estimate<F: Fn(&PerPathRecord) -> f64>(&self, name: &str, f: F) -> Result<EstimatorResult> {
        let values: Vec<f64> = self.usable().map(f).collect();
        if values.is_empty() {
            return Err(Error::EstimationFailed(format!(
                "{name}: all {} paths hit the step cap",
                self.records.len()
            )));
        }
        let mut meta = self.metadata.clone();
        meta.estimator = name.to_string();
        EstimatorResult::from_values(&values, self.n_capped, meta)
    }
}

fn streamed_record(config: &SimulationConfig, stream_id: u64, acc: &mut HullAccumulator) -> PerPathRecord {
    acc.clear();
    let mut m = f64::NEG_INFINITY;
    let mut y_at = 0.0;
    let summary = walk_bm_until_disk_exit(config, stream_id, |p| {
        acc.push(p);
        if p.x > m {
            m = p.x;
            y_at = p.y;
        }
    });
    let hull = acc.finish();
    PerPathRecord {
        stream_id,
        perimeter: polygon_perimeter(&hull),
        convex_area: polygon_area(&hull),
        star_area: None,
        star_max_radius: None,
        m_sample: m,
        y_at_argmax: y_at,
        n_steps: summary.n_steps,
        capped: summary.capped,
    }
}

/// Convex-hull record of an explicit path (batch hull, no streaming).
pub fn convex_record_from_path(path: &PolygonalPath) -> PerPathRecord {
    let hull = convex_hull(path.vertices()).expect("paths are nonempty and finite");
    let (m, idx) = directional_max(0.0, path);
    PerPathRecord {
        stream_id: 0,
        perimeter: polygon_perimeter(&hull),
        convex_area: polygon_area(&hull),
        star_area: None,
        star_max_radius: None,
        m_sample: m,
        y_at_argmax: path.vertices()[idx].y,
        n_steps: path.len() as u64 - 1,
        capped: false,
    }
}

pub fn simulate_convex(config: &SimulationConfig, n_paths: usize, workers: usize) -> Result<ConvexRun> {
    config.validate()?;
    check_n_paths(n_paths, 2, "convex-hull simulation")?;
    let clock = Stopwatch::start();
    let records = parallel_map(n_paths, workers, HullAccumulator::default, |acc, id| {
        streamed_record(config, id, acc)
    })?;
    let n_capped = records.iter().filter(|r| r.capped).count();
    let mut metadata = RunMetadata::for_paths("convex-hull", config, n_paths, workers);
    metadata.wall_time_s = clock.seconds();
    Ok(ConvexRun {
        records,
        n_capped,
        metadata,
    })
}

pub fn perimeter_estimate(run: &ConvexRun) -> Result<EstimatorResult> {
    run.estimate("perimeter", |r| r.perimeter)
}

pub fn convex_area_direct_estimate(run: &ConvexRun) -> Result<EstimatorResult> {
    run.estimate("convex-area-direct", |r| r.convex_area)
}

/// `π M² − π Y_T²` per path. Its plain standard error is the delta-method
/// error of `π mean(M²) − π mean(Y_T²)` with the covariance included.
pub fn convex_area_blaschke_estimate(run: &ConvexRun) -> Result<EstimatorResult> {
    run.estimate("convex-area-blaschke", |r| {
        PI * (r.m_sample * r.m_sample - r.y_at_argmax * r.y_at_argmax)
    })
}

/// `π M²` per path, the simulated upper-bound term.
pub fn support_square_estimate(run: &ConvexRun) -> Result<EstimatorResult> {
    run.estimate("pi-m-squared", |r| PI * r.m_sample * r.m_sample)
}

pub fn estimate_perimeter(config: &SimulationConfig, n_paths: usize, workers: usize) -> Result<EstimatorResult> {
    check_n_paths(n_paths, 100, "estimate_perimeter")?;
    perimeter_estimate(&simulate_convex(config, n_paths, workers)?)
}

pub fn estimate_convex_area_direct(
    config: &SimulationConfig,
    n_paths: usize,
    workers: usize,
) -> Result<EstimatorResult> {
    check_n_paths(n_paths, 100, "estimate_convex_area_direct")?;
    convex_area_direct_estimate(&simulate_convex(config, n_paths, workers)?)
}

pub fn estimate_convex_area_blaschke(
    config: &SimulationConfig,
    n_paths: usize,
    workers: usize,
) -> Result<EstimatorResult> {
    check_n_paths(n_paths, 100, "estimate_convex_area_blaschke")?;
    convex_area_blaschke_estimate(&simulate_convex(config, n_paths, workers)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::sampling::{sample_bm_until_disk_exit, BoundaryMode};

    #[test]
    fn degenerate_path_perimeter() {
        let p = PolygonalPath::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]).unwrap();
        let r = convex_record_from_path(&p);
        assert_eq!(r.perimeter, 2.0);
        assert_eq!(r.convex_area, 0.0);
        assert_eq!(r.m_sample, 1.0);
    }

    #[test]
    fn circle_path_area() {
        let v: Vec<Point2> = (0..360)
            .map(|k| Point2::unit(2.0 * PI * k as f64 / 360.0))
            .collect();
        let r = convex_record_from_path(&PolygonalPath::new(v).unwrap());
        assert!((r.convex_area - PI).abs() < 1e-3);
    }

    #[test]
    fn streamed_record_matches_stored_path() {
        let cfg = SimulationConfig::new(1e-4, 42, BoundaryMode::FirstExterior).unwrap();
        let mut acc = HullAccumulator::default();
        for id in 0..20 {
            let streamed = streamed_record(&cfg, id, &mut acc);
            let sample = sample_bm_until_disk_exit(&cfg, id);
            let stored = convex_record_from_path(&sample.path);
            assert_eq!(streamed.perimeter, stored.perimeter);
            assert_eq!(streamed.convex_area, stored.convex_area);
            assert_eq!(streamed.m_sample, stored.m_sample);
            assert_eq!(streamed.y_at_argmax, stored.y_at_argmax);
            assert_eq!(streamed.n_steps, sample.n_steps);
        }
    }

    #[test]
    fn all_capped_is_an_error() {
        let run = ConvexRun {
            records: vec![
                PerPathRecord {
                    stream_id: 0,
                    perimeter: 1.0,
                    convex_area: 0.1,
                    star_area: None,
                    star_max_radius: None,
                    m_sample: 0.1,
                    y_at_argmax: 0.0,
                    n_steps: 10,
                    capped: true,
                };
                3
            ],
            n_capped: 3,
            metadata: RunMetadata::for_paths(
                "t",
                &SimulationConfig::new(0.1, 0, BoundaryMode::FirstExterior).unwrap(),
                3,
                1,
            ),
        };
        assert!(matches!(perimeter_estimate(&run), Err(Error::EstimationFailed(_))));
    }

    #[test]
    fn minimum_path_count() {
        let cfg = SimulationConfig::new(1e-2, 1, BoundaryMode::FirstExterior).unwrap();
        assert!(estimate_perimeter(&cfg, 99, 1).is_err());
        assert!(estimate_perimeter(&cfg, 100, 0).is_err());
    }
}
