//! Experiment driver behind the `helmcert` binary.

pub mod commands;
pub mod config;
pub mod expr;

pub use commands::{run, validate_for, verify_at, write_outputs, Command, Output};
pub use config::{ExperimentConfig, Overrides, Prepared};
pub use expr::GammaExpr;
