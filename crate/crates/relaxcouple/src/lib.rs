//! Experiment harness for `relaxcouple-core`: configuration files, CSV
//! output and the `run`, `convergence` and `consistency` commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{cmd_consistency, cmd_convergence, cmd_run};
pub use config::{RunConfig, Scenario};
pub use error::{Result, RunError};
