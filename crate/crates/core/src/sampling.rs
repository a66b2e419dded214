//! Reproducible Brownian trajectories killed at the unit circle and lattice
//! walks killed at a radius.
//!
//! Every random draw comes from [`derive_stream`]: a ChaCha8 keystream keyed
//! by the master seed, with the stream id selecting one of 2^64 disjoint
//! counter spaces. A path is therefore a pure function of
//! `(config, stream_id)`, whichever worker generates it.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, PolygonalPath};

/// Name of the generator pair, recorded in run metadata.
pub const GENERATOR: &str = "ChaCha8 (seed_from_u64 + set_stream) / ziggurat StandardNormal";

pub type StreamRng = ChaCha8Rng;

pub fn derive_stream(master_seed: u64, stream_id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_id);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundaryMode {
    /// Stop at the first sample with `‖w‖ ≥ 1` and keep it as is.
    #[default]
    FirstExterior,
    /// Replace the final sample by the crossing point of the last segment
    /// with the unit circle.
    CircleInterpolated,
}

impl BoundaryMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryMode::FirstExterior => "FIRST_EXTERIOR",
            BoundaryMode::CircleInterpolated => "CIRCLE_INTERPOLATED",
        }
    }
}

impl std::str::FromStr for BoundaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "first_exterior" => Ok(BoundaryMode::FirstExterior),
            "circle_interpolated" => Ok(BoundaryMode::CircleInterpolated),
            _ => Err(Error::InvalidInput(format!("unknown boundary mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub dt: f64,
    pub master_seed: u64,
    pub boundary_mode: BoundaryMode,
    pub max_steps: u64,
}

impl SimulationConfig {
    /// Config with the default cap of 100 time units.
    pub fn new(dt: f64, master_seed: u64, boundary_mode: BoundaryMode) -> Result<Self> {
        let cfg = SimulationConfig {
            dt,
            master_seed,
            boundary_mode,
            max_steps: Self::default_max_steps(dt),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn default_max_steps(dt: f64) -> u64 {
        (100.0 / dt).ceil() as u64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= 1.0) {
            return Err(Error::InvalidInput(format!("dt = {} not in (0, 1]", self.dt)));
        }
        if (self.max_steps as f64) * self.dt < 100.0 - 1e-9 {
            return Err(Error::InvalidInput(format!(
                "max_steps * dt = {} is below 100 time units",
                self.max_steps as f64 * self.dt
            )));
        }
        Ok(())
    }
}

/// Bookkeeping for a trajectory run until its first exterior sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitSummary {
    pub exit_point: Point2,
    pub n_steps: u64,
    pub capped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub path: PolygonalPath,
    pub exit_point: Point2,
    pub n_steps: u64,
    pub capped: bool,
}

/// Point where the segment `p -> q` crosses the unit circle, for `‖p‖ < 1 ≤ ‖q‖`.
pub fn circle_crossing(p: Point2, q: Point2) -> Point2 {
    let d = q - p;
    let a = d.norm_sq();
    let b = p.dot(d);
    let c = p.norm_sq() - 1.0;
    // c < 0, so the discriminant is positive and the + root lies in (0, 1].
    let s = ((-b + (b * b - a * c).sqrt()) / a).clamp(0.0, 1.0);
    let x = p + d * s;
    // Remove the last few ulps of radial error.
    x * (1.0 / x.norm())
}

/// Runs the Euler scheme, handing every vertex (origin first, exit sample
/// last) to `visit`. Draw order is fixed, so the streamed and stored variants
/// see bit-identical vertices.
pub fn walk_bm_until_disk_exit<F: FnMut(Point2)>(
    config: &SimulationConfig,
    stream_id: u64,
    mut visit: F,
) -> ExitSummary {
    let mut rng = derive_stream(config.master_seed, stream_id);
    let sd = config.dt.sqrt();
    let mut w = Point2::ORIGIN;
    visit(w);
    let mut n_steps = 0u64;
    while n_steps < config.max_steps {
        let zx: f64 = rng.sample(StandardNormal);
        let zy: f64 = rng.sample(StandardNormal);
        let next = Point2::new(w.x + sd * zx, w.y + sd * zy);
        n_steps += 1;
        if next.norm_sq() >= 1.0 {
            let exit = match config.boundary_mode {
                BoundaryMode::FirstExterior => next,
                BoundaryMode::CircleInterpolated => circle_crossing(w, next),
            };
            visit(exit);
            return ExitSummary {
                exit_point: exit,
                n_steps,
                capped: false,
            };
        }
        visit(next);
        w = next;
    }
    ExitSummary {
        exit_point: w,
        n_steps,
        capped: true,
    }
}

pub fn sample_bm_until_disk_exit(config: &SimulationConfig, stream_id: u64) -> PathSample {
    let mut vertices = Vec::with_capacity((0.6 / config.dt).min(1e7) as usize);
    let summary = walk_bm_until_disk_exit(config, stream_id, |p| vertices.push(p));
    PathSample {
        path: PolygonalPath::from_trusted(vertices),
        exit_point: summary.exit_point,
        n_steps: summary.n_steps,
        capped: summary.capped,
    }
}

/// A nearest-neighbour walk on `Z²` from the origin, stopped at the first site
/// with Euclidean norm strictly greater than `kill_radius`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePath {
    pub sites: Vec<(i32, i32)>,
    pub kill_radius: u32,
}

impl LatticePath {
    pub fn n_steps(&self) -> usize {
        self.sites.len() - 1
    }
}

pub const LATTICE_STEP_CAP: u64 = 1_000_000_000;

pub fn sample_lattice_walk(kill_radius: u32, master_seed: u64, stream_id: u64) -> Result<LatticePath> {
    if kill_radius < 1 {
        return Err(Error::InvalidInput("kill_radius must be at least 1".into()));
    }
    let mut rng = derive_stream(master_seed, stream_id);
    let r2 = i64::from(kill_radius) * i64::from(kill_radius);
    let mut sites = Vec::with_capacity((kill_radius as usize).pow(2) + 16);
    let (mut x, mut y) = (0i32, 0i32);
    sites.push((x, y));
    let mut bits = 0u64;
    let mut left = 0u32;
    for _ in 0..LATTICE_STEP_CAP {
        if left == 0 {
            bits = rng.next_u64();
            left = 32;
        }
        match bits & 3 {
            0 => x += 1,
            1 => x -= 1,
            2 => y += 1,
            _ => y -= 1,
        }
        bits >>= 2;
        left -= 1;
        sites.push((x, y));
        if i64::from(x) * i64::from(x) + i64::from(y) * i64::from(y) > r2 {
            return Ok(LatticePath { sites, kill_radius });
        }
    }
    Err(Error::EstimationFailed(format!(
        "lattice walk on stream {stream_id} exceeded {LATTICE_STEP_CAP} steps"
    )))
}
