//! Config-driven experiment runner for `spinbridge`.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::CliError;
