//! Experiment runner: configuration, figure recipes, CSV output and the
//! self-check suite behind the `maxcons` binary.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod figures;
pub mod selfcheck;

pub use error::{CliError, CliResult};
