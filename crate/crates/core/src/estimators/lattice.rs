//! Outer boundary of the topological hull of a lattice walk.
//!
//! The trace is the union of the walk's unit edges. Its topological hull is
//! the trace plus every bounded component of the complement, i.e. the
//! enclosed unit cells. The boundary of the unbounded face is followed with
//! the exterior kept on the right; dangling edges are walked out and back and
//! cancel in the shoelace sum, so the loop's area is the enclosed cell count.

use super::{check_n_paths, parallel_map, EstimatorResult, RunMetadata, Stopwatch};
use crate::error::{Error, Result};
use crate::sampling::{sample_lattice_walk, LatticePath, GENERATOR};

// Headings in counterclockwise order.
const EAST: u8 = 0;
const NORTH: u8 = 1;
const WEST: u8 = 2;
const SOUTH: u8 = 3;

struct EdgeGrid {
    min_x: i32,
    min_y: i32,
    width: usize,
    /// `h[(x, y)]`: edge `(x, y)–(x+1, y)`; `v[(x, y)]`: edge `(x, y)–(x, y+1)`.
    h: Vec<bool>,
    v: Vec<bool>,
}

impl EdgeGrid {
    fn build(sites: &[(i32, i32)]) -> Self {
        let (mut min_x, mut max_x, mut min_y, mut max_y) = (i32::MAX, i32::MIN, i32::MAX, i32::MIN);
        for &(x, y) in sites {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
        let width = (max_x - min_x + 1) as usize;
        let height = (max_y - min_y + 1) as usize;
        let mut grid = EdgeGrid {
            min_x,
            min_y,
            width,
            h: vec![false; width * height],
            v: vec![false; width * height],
        };
        for w in sites.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if y0 == y1 {
                let i = grid.index(x0.min(x1), y0);
                grid.h[i] = true;
            } else {
                let i = grid.index(x0, y0.min(y1));
                grid.v[i] = true;
            }
        }
        grid
    }

    #[inline]
    fn index(&self, x: i32, y: i32) -> usize {
        (y - self.min_y) as usize * self.width + (x - self.min_x) as usize
    }

    #[inline]
    fn has_edge(&self, x: i32, y: i32, dir: u8) -> bool {
        match dir {
            EAST => self.h[self.index(x, y)],
            WEST => x > self.min_x && self.h[self.index(x - 1, y)],
            NORTH => self.v[self.index(x, y)],
            SOUTH => y > self.min_y && self.v[self.index(x, y - 1)],
            _ => false,
        }
    }
}

#[inline]
fn step((x, y): (i32, i32), dir: u8) -> (i32, i32) {
    match dir {
        EAST => (x + 1, y),
        NORTH => (x, y + 1),
        WEST => (x - 1, y),
        SOUTH => (x, y - 1),
        _ => unreachable!("heading is taken mod 4"),
    }
}

/// Closed outer boundary loop of the walk's topological hull, starting at the
/// lexicographically smallest site. The start is not repeated at the end.
pub fn trace_outer_boundary(walk: &LatticePath) -> Result<Vec<(i32, i32)>> {
    if walk.sites.len() < 2 {
        return Err(Error::InvalidInput("walk needs at least two sites".into()));
    }
    let grid = EdgeGrid::build(&walk.sites);
    let start = *walk.sites.iter().min().expect("nonempty");

    // Nothing lies west of `start` or south of it on its column, so
    // pretending to arrive heading north makes the first choice an edge with
    // the exterior on its right.
    let choose = |at: (i32, i32), heading: u8| -> u8 {
        for turn in [3u8, 0, 1, 2] {
            let d = (heading + turn) % 4;
            if grid.has_edge(at.0, at.1, d) {
                return d;
            }
        }
        unreachable!("every site of a walk with two or more sites has an edge")
    };

    let first = choose(start, NORTH);
    let mut boundary = vec![start];
    let mut at = step(start, first);
    let mut heading = first;
    loop {
        let next = choose(at, heading);
        if at == start && next == first {
            break;
        }
        boundary.push(at);
        at = step(at, next);
        heading = next;
    }
    Ok(boundary)
}

/// Twice the signed shoelace area of a closed lattice loop.
pub fn loop_twice_area(boundary: &[(i32, i32)]) -> i64 {
    let n = boundary.len();
    (0..n)
        .map(|i| {
            let (x0, y0) = boundary[i];
            let (x1, y1) = boundary[(i + 1) % n];
            i64::from(x0) * i64::from(y1) - i64::from(x1) * i64::from(y0)
        })
        .sum()
}

/// Number of unit cells enclosed by the walk's trace.
pub fn enclosed_area(walk: &LatticePath) -> Result<i64> {
    let twice = loop_twice_area(&trace_outer_boundary(walk)?);
    debug_assert!(twice >= 0 && twice % 2 == 0);
    Ok(twice / 2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologicalRun {
    /// Enclosed area per walk, scaled by `R⁻²`.
    pub scaled_areas: Vec<f64>,
    pub cell_counts: Vec<i64>,
    pub metadata: RunMetadata,
}

pub fn simulate_topological(
    kill_radius: u32,
    n_walks: usize,
    seed: u64,
    workers: usize,
) -> Result<TopologicalRun> {
    if kill_radius < 1 {
        return Err(Error::InvalidInput("kill_radius must be at least 1".into()));
    }
    check_n_paths(n_walks, 2, "topological-hull simulation")?;
    let clock = Stopwatch::start();
    let counts = parallel_map(n_walks, workers, || (), |_, id| {
        sample_lattice_walk(kill_radius, seed, id).and_then(|w| enclosed_area(&w))
    })?
    .into_iter()
    .collect::<Result<Vec<i64>>>()?;
    let scale = 1.0 / (f64::from(kill_radius) * f64::from(kill_radius));
    let metadata = RunMetadata {
        estimator: "topological-area".to_string(),
        master_seed: seed,
        dt: None,
        boundary_mode: None,
        kill_radius: Some(kill_radius),
        m_directions: None,
        n_requested: n_walks,
        workers,
        generator: GENERATOR.to_string(),
        ci_method: super::CI_METHOD.to_string(),
        wall_time_s: clock.seconds(),
    };
    Ok(TopologicalRun {
        scaled_areas: counts.iter().map(|&c| c as f64 * scale).collect(),
        cell_counts: counts,
        metadata,
    })
}

pub fn estimate_topological_area(
    kill_radius: u32,
    n_walks: usize,
    seed: u64,
    workers: usize,
) -> Result<EstimatorResult> {
    if kill_radius < 10 {
        return Err(Error::InvalidInput(format!(
            "kill_radius must be at least 10, got {kill_radius}"
        )));
    }
    check_n_paths(n_walks, 100, "estimate_topological_area")?;
    let run = simulate_topological(kill_radius, n_walks, seed, workers)?;
    EstimatorResult::from_values(&run.scaled_areas, 0, run.metadata)
}
