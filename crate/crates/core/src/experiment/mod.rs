//! Whole-experiment orchestration: configuration, CSV input/output, the
//! pipelines behind each subcommand and the run manifest.

pub mod cli;
pub mod config;
pub mod io;
pub mod run;

pub use config::{ExperimentConfig, Pipeline};
pub use io::{read_dataset, write_csv, write_dataset, Table};
pub use run::{execute, exit_code, run, RunManifest, RunOutput};
