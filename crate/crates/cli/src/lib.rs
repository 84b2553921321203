//! Experiment harness for the `phased-mimo` crate: JSON configs, experiment
//! runners and CSV result files with embedded provenance hashes.

use std::path::PathBuf;

pub mod config;
pub mod experiment;
pub mod table;

pub use config::{load_config, load_raw, parse_config, parse_raw, Experiment, ExperimentConfig};
pub use experiment::{compute, run_experiment, ExperimentOutput, RunSummary};
pub use table::{emit_csv, read_csv, verify_hash, Metadata, ResultTable};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config parse error at `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("invalid config field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("{path}:{line}: {message}")]
    Csv { path: PathBuf, line: usize, message: String },
    #[error("{path}: scenario hash mismatch (recorded {recorded}, computed {actual})")]
    HashMismatch { path: PathBuf, recorded: String, actual: String },
    #[error(transparent)]
    Core(#[from] phased_mimo::Error),
}
