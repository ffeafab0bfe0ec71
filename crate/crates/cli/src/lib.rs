//! Experiment driver for the `ghlab` binary: configuration, commands,
//! artifacts and run manifests.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod svg;

pub use commands::{execute, Command, Outcome, Overrides, RunError};
pub use config::{ConfigError, ExperimentConfig};

// The guide's CLI chapter runs as doctests against this crate.
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
