//! Experiment harness over `vtslab-core`.
//!
//! A run takes an [`config::ExperimentConfig`], evaluates every assertion of
//! the selected families with [`runner::run_experiment`], and writes the
//! results with [`emit::write_results`].

pub mod config;
pub mod emit;
pub mod error;
pub mod runner;

pub use config::{ExperimentConfig, Format, Kind};
pub use error::{HarnessError, Result};
pub use runner::{run_experiment, ResultRecord, ResultSet};
