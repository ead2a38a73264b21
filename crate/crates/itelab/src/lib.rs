//! Command-line laboratory around `itelab-core`: JSON configuration,
//! deterministic CSV/JSON artifacts and the experiment commands.

pub mod commands;
pub mod config;
pub mod io;

pub use commands::{run, CliError, Command, Outcome};
pub use config::{ConfigError, ExperimentConfig, ProfileSpec};
