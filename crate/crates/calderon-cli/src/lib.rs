//! Experiment runner for the rough-kernel commutator laboratory: config
//! parsing, checker dispatch, CSV/JSON reporting, and the run manifest.

pub mod config;
pub mod runner;

pub use config::{parse_config, parse_config_file, ConfigError, ExperimentConfig};
pub use runner::{list_experiments, run_experiments, RunManifest};
