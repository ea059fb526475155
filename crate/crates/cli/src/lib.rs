//! Configuration, benchmark grid and report writers behind the `laminate` binary.

pub mod bench;
pub mod config;
pub mod report;

pub use bench::{run_bench, BenchOutcome, BenchRecord, CellFailure};
pub use config::{Backend, BenchConfig, FamilyKind, ProblemConfig};
pub use report::{emit_report, write_csv, write_json, ReportFormat};

/// Errors of the command-line layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] laminate_core::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
