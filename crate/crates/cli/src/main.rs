use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bmhull::sampling::BoundaryMode;
use bmhull_cli::commands::{self, Which};
use bmhull_cli::config::{resolve, FileConfig, Overrides, Preset, Resolved, Target, WORKERS_ENV};
use bmhull_cli::{CliError, Result};
use clap::{Args, Parser, Subcommand};

/// Hulls of planar Brownian motion killed at the unit circle: exact
/// constants, Monte Carlo estimates and exported curves.
#[derive(Debug, Parser)]
#[command(name = "bmhull", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Args)]
struct Flags {
    /// Euler time step.
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Number of trajectories (walks for topological-area).
    #[arg(long, global = true)]
    n_paths: Option<usize>,
    /// Directions for the star-hull radial sum.
    #[arg(long, global = true)]
    m_directions: Option<usize>,
    /// Lattice kill radius.
    #[arg(long, global = true)]
    kill_radius: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// FIRST_EXTERIOR or CIRCLE_INTERPOLATED.
    #[arg(long, global = true)]
    boundary_mode: Option<BoundaryMode>,
    /// Worker threads; does not change any result.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// desk or paper.
    #[arg(long, global = true)]
    preset: Option<Preset>,
    /// Output file (JSON document, or CSV for cdf-export). Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML config file with [run], [convex], [star], [topological],
    /// [quadrature] and [export] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact constants and the conformal cross-check.
    Analytic,
    /// Run one Monte Carlo estimator.
    Simulate {
        which: Which,
        /// Where `simulate cdf` writes its table; defaults to the --out path
        /// with a .csv extension.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Expected areas of the three hulls with bounds and bracket flags.
    Table1,
    /// Exact CDF and survival curves as CSV.
    CdfExport {
        /// Number of interior grid points.
        #[arg(long)]
        grid: Option<usize>,
    },
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let f = cli.flags;
    let file = f.config.as_deref().map(FileConfig::load).transpose()?;
    let (target, grid) = match &cli.command {
        Command::Analytic => (Target::All, None),
        Command::Simulate { which, .. } => (
            match which {
                Which::Perimeter | Which::ConvexArea | Which::Cdf => Target::Convex,
                Which::StarArea => Target::Star,
                Which::TopologicalArea => Target::Topological,
            },
            None,
        ),
        Command::Table1 => (Target::All, None),
        Command::CdfExport { grid } => (Target::All, *grid),
    };
    let flags = Overrides {
        preset: f.preset,
        dt: f.dt,
        n_paths: f.n_paths,
        m_directions: f.m_directions,
        kill_radius: f.kill_radius,
        seed: f.seed,
        boundary_mode: f.boundary_mode,
        workers: f.workers,
        grid,
        out: f.out,
    };
    let env = std::env::var(WORKERS_ENV).ok();
    let resolved: Resolved = resolve(file.as_ref(), &flags, target, env.as_deref())?;
    for line in &resolved.overrides {
        eprintln!("override: {line}");
    }
    let out = resolved.config.out.clone();

    let document = match cli.command {
        Command::CdfExport { .. } => {
            let export = commands::cmd_cdf_export(&resolved)?;
            emit(out.as_deref(), &export.csv)?;
            eprintln!(
                "cdf-export: {} rows, max conformal discrepancy {:.3e}",
                resolved.config.grid, export.max_discrepancy
            );
            return Ok(export.passed());
        }
        Command::Analytic => commands::cmd_analytic(&resolved)?,
        Command::Table1 => commands::cmd_table1(&resolved)?,
        Command::Simulate { which, csv } => {
            let outcome = commands::cmd_simulate(&resolved, which)?;
            if let Some(table) = &outcome.csv {
                match csv.or_else(|| out.as_ref().map(|p| p.with_extension("csv"))) {
                    Some(p) => write(&p, table)?,
                    None => eprintln!("(pass --csv or --out to save the CDF table)"),
                }
            }
            outcome.document
        }
    };
    emit(out.as_deref(), &document.to_json()?)?;
    eprint!("{}", document.render());
    Ok(document.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(2)
        }
    }
}
