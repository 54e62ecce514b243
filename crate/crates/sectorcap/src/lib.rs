//! Experiment driver for the `sectorcap-core` analysis engine: TOML
//! configuration, parallel Monte Carlo, result tables with metadata, and
//! the validation suite behind `sectorcap validate`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod orientation;
pub mod parallel;
pub mod streams;
pub mod table;
pub mod validate;

pub use config::{ExperimentConfig, DEFAULT_SEED};
pub use error::{AppError, AppResult};
