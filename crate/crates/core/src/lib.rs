//! Convex, star and topological hulls of planar Brownian motion started at
//! the origin and killed on the unit circle.
//!
//! - [`analytic`]: law of the directional maximum `M`, `E[M]`, `E[M²]`, the
//!   expected perimeter `2π E[M]`, the area bracket and the exact star-hull
//!   area `π − 8/3`.
//! - [`conformal`]: truncated-disk and slit-disk maps giving an independent
//!   harmonic-measure route to the same laws.
//! - [`sampling`]: seeded Euler trajectories and lattice walks.
//! - [`estimators`]: Monte Carlo reproduction of the simulated hull areas and
//!   perimeter.
//! - [`geometry`]: hulls, shoelace, support and radial functions.

pub mod analytic;
pub mod conformal;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod quadrature;
pub mod sampling;

pub use error::{Error, Result};

/// Crate version, embedded in exported results.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
