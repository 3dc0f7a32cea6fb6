//! Experiment runner for the spinbath simulation library: TOML configs in,
//! CSV tables with TOML metadata sidecars out.

pub mod config;
pub mod error;
pub mod oracle;
pub mod runner;
pub mod table;

pub use config::{Experiment, ExperimentConfig, ResolvedConfig};
pub use error::{CliError, Result};
pub use oracle::run_oracle_suite;
pub use runner::run_experiment;
pub use table::ResultTable;
