//! Experiment runner for the `swleak` library: one JSON config drives every
//! task and each run writes CSV/JSON reports plus a manifest.

pub mod app;
pub mod config;
pub mod error;
pub mod run;
pub mod tasks;
pub mod validate;

pub use config::{ExperimentConfig, Task};
pub use error::CliError;
pub use run::{run, RunManifest};
pub use validate::{validate, Diagnostic};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
