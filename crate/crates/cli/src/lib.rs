//! Library side of the `bmhull` command: configuration layering, result
//! documents, and the commands themselves.

pub mod commands;
pub mod config;
pub mod document;
pub mod error;

pub use error::{CliError, Result};
