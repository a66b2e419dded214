//! Effective run configuration: preset defaults, then the config file, then
//! command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bmhull::quadrature::QuadratureSpec;
use bmhull::sampling::{BoundaryMode, SimulationConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Environment variable that replaces the built-in default worker count.
pub const WORKERS_ENV: &str = "BMHULL_WORKERS";

pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    #[default]
    Desk,
    Paper,
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Desk => "desk",
            Preset::Paper => "paper",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            _ => Err(CliError::Setting(format!("unknown preset '{s}' (desk|paper)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexSettings {
    pub dt: f64,
    pub n_paths: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarSettings {
    pub dt: f64,
    pub n_paths: usize,
    pub m_directions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopologicalSettings {
    pub kill_radius: u32,
    pub n_walks: usize,
}

/// Everything a command may need. Serialized verbatim into each document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub preset: Preset,
    pub seed: u64,
    pub boundary_mode: BoundaryMode,
    pub workers: usize,
    pub convex: ConvexSettings,
    pub star: StarSettings,
    pub topological: TopologicalSettings,
    pub quadrature: QuadratureSpec,
    /// Number of interior points of the CDF export grid.
    pub grid: usize,
    pub out: Option<PathBuf>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl RunConfig {
    pub fn preset(preset: Preset) -> Self {
        let (convex, star, topological) = match preset {
            Preset::Desk => (
                ConvexSettings {
                    dt: 1e-5,
                    n_paths: 20_000,
                },
                StarSettings {
                    dt: 1e-5,
                    n_paths: 5_000,
                    m_directions: 720,
                },
                TopologicalSettings {
                    kill_radius: 300,
                    n_walks: 20_000,
                },
            ),
            Preset::Paper => (
                ConvexSettings {
                    dt: 1e-7,
                    n_paths: 100_000,
                },
                StarSettings {
                    dt: 1e-6,
                    n_paths: 100_000,
                    m_directions: 2000,
                },
                TopologicalSettings {
                    kill_radius: 1000,
                    n_walks: 100_000,
                },
            ),
        };
        RunConfig {
            preset,
            seed: DEFAULT_SEED,
            boundary_mode: BoundaryMode::FirstExterior,
            workers: default_workers(),
            convex,
            star,
            topological,
            quadrature: QuadratureSpec::default(),
            grid: 99,
            out: None,
        }
    }

    pub fn convex_sim(&self) -> Result<SimulationConfig> {
        Ok(SimulationConfig::new(self.convex.dt, self.seed, self.boundary_mode)?)
    }

    pub fn star_sim(&self) -> Result<SimulationConfig> {
        Ok(SimulationConfig::new(self.star.dt, self.seed, self.boundary_mode)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        self.convex_sim()?;
        self.star_sim()?;
        if self.workers == 0 {
            return Err(CliError::Setting("workers must be at least 1".into()));
        }
        if self.grid < 2 {
            return Err(CliError::Setting(format!("grid must be at least 2, got {}", self.grid)));
        }
        Ok(())
    }

    /// One-line `key=value` echo used in error messages.
    pub fn summary(&self) -> String {
        format!(
            "preset={} seed={} boundary_mode={} workers={} convex.dt={:e} convex.n_paths={} \
             star.dt={:e} star.n_paths={} star.m_directions={} kill_radius={} n_walks={}",
            self.preset,
            self.seed,
            self.boundary_mode.as_str(),
            self.workers,
            self.convex.dt,
            self.convex.n_paths,
            self.star.dt,
            self.star.n_paths,
            self.star.m_directions,
            self.topological.kill_radius,
            self.topological.n_walks,
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileRun {
    pub preset: Option<Preset>,
    pub seed: Option<u64>,
    pub boundary_mode: Option<String>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConvex {
    pub dt: Option<f64>,
    pub n_paths: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileStar {
    pub dt: Option<f64>,
    pub n_paths: Option<usize>,
    pub m_directions: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileTopological {
    pub kill_radius: Option<u32>,
    pub n_walks: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileQuadrature {
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileExport {
    pub grid: Option<usize>,
}

/// Sectioned config file; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub run: FileRun,
    #[serde(default)]
    pub convex: FileConvex,
    #[serde(default)]
    pub star: FileStar,
    #[serde(default)]
    pub topological: FileTopological,
    #[serde(default)]
    pub quadrature: FileQuadrature,
    #[serde(default)]
    pub export: FileExport,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|source| CliError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

/// Command-line values. `None` leaves the lower layers in place.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub dt: Option<f64>,
    pub n_paths: Option<usize>,
    pub m_directions: Option<usize>,
    pub kill_radius: Option<u32>,
    pub seed: Option<u64>,
    pub boundary_mode: Option<BoundaryMode>,
    pub workers: Option<usize>,
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Which estimator `--n-paths` and `--dt` refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Convex,
    Star,
    Topological,
    All,
}

/// An effective config plus the log of every value that replaced a default.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub config: RunConfig,
    pub overrides: Vec<String>,
}

macro_rules! take {
    ($log:expr, $src:literal, $dst:expr, $val:expr, $name:literal) => {
        if let Some(v) = $val {
            $dst = v;
            $log.push(format!("{} = {:?} ({})", $name, $dst, $src));
        }
    };
}

pub fn resolve(
    file: Option<&FileConfig>,
    flags: &Overrides,
    target: Target,
    env_workers: Option<&str>,
) -> Result<Resolved> {
    let empty = FileConfig::default();
    let file = file.unwrap_or(&empty);
    let preset = flags.preset.or(file.run.preset).unwrap_or_default();
    let mut c = RunConfig::preset(preset);
    let mut log = Vec::new();
    if preset != Preset::Desk {
        log.push(format!("preset = {preset}"));
    }

    if let Some(w) = env_workers {
        let n = w
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Setting(format!("{WORKERS_ENV}='{w}' is not a worker count")))?;
        take!(log, "environment", c.workers, Some(n), "workers");
    }

    let r = &file.run;
    take!(log, "config file", c.seed, r.seed, "seed");
    if let Some(m) = &r.boundary_mode {
        take!(log, "config file", c.boundary_mode, Some(m.parse()?), "boundary_mode");
    }
    take!(log, "config file", c.workers, r.workers, "workers");
    if let Some(out) = &r.out {
        take!(log, "config file", c.out, Some(Some(out.clone())), "out");
    }
    take!(log, "config file", c.convex.dt, file.convex.dt, "convex.dt");
    take!(log, "config file", c.convex.n_paths, file.convex.n_paths, "convex.n_paths");
    take!(log, "config file", c.star.dt, file.star.dt, "star.dt");
    take!(log, "config file", c.star.n_paths, file.star.n_paths, "star.n_paths");
    take!(log, "config file", c.star.m_directions, file.star.m_directions, "star.m_directions");
    take!(log, "config file", c.topological.kill_radius, file.topological.kill_radius, "topological.kill_radius");
    take!(log, "config file", c.topological.n_walks, file.topological.n_walks, "topological.n_walks");
    take!(log, "config file", c.quadrature.abs_tol, file.quadrature.abs_tol, "quadrature.abs_tol");
    take!(log, "config file", c.quadrature.rel_tol, file.quadrature.rel_tol, "quadrature.rel_tol");
    take!(
        log,
        "config file",
        c.quadrature.max_subdivisions,
        file.quadrature.max_subdivisions,
        "quadrature.max_subdivisions"
    );
    take!(log, "config file", c.grid, file.export.grid, "export.grid");

    take!(log, "flag", c.seed, flags.seed, "seed");
    take!(log, "flag", c.boundary_mode, flags.boundary_mode, "boundary_mode");
    take!(log, "flag", c.workers, flags.workers, "workers");
    take!(log, "flag", c.grid, flags.grid, "grid");
    take!(log, "flag", c.star.m_directions, flags.m_directions, "star.m_directions");
    take!(log, "flag", c.topological.kill_radius, flags.kill_radius, "topological.kill_radius");
    if let Some(out) = &flags.out {
        take!(log, "flag", c.out, Some(Some(out.clone())), "out");
    }
    let (convex, star, topo) = match target {
        Target::Convex => (true, false, false),
        Target::Star => (false, true, false),
        Target::Topological => (false, false, true),
        Target::All => (true, true, true),
    };
    if convex {
        take!(log, "flag", c.convex.dt, flags.dt, "convex.dt");
        take!(log, "flag", c.convex.n_paths, flags.n_paths, "convex.n_paths");
    }
    if star {
        take!(log, "flag", c.star.dt, flags.dt, "star.dt");
        take!(log, "flag", c.star.n_paths, flags.n_paths, "star.n_paths");
    }
    if topo {
        take!(log, "flag", c.topological.n_walks, flags.n_paths, "topological.n_walks");
    }

    c.validate()?;
    Ok(Resolved {
        config: c,
        overrides: log,
    })
}
