//! File formats, run configuration and subcommands around `epochcast-core`.

pub mod commands;
pub mod config;
pub mod csv_db;
mod error;
pub mod model_io;
pub mod reports;
pub mod svg;

pub use error::{Error, Result};
