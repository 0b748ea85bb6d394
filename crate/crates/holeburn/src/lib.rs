//! Config-driven experiments on top of `holeburn-core`: TOML configuration,
//! CSV/JSON artifacts and the `holeburn` command line.

use std::path::{Path, PathBuf};

pub mod cli;
pub mod config;
pub mod experiments;
pub mod io;

pub use config::ExperimentConfig;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] holeburn_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

impl AppError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for invalid input, 3 for solver failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Core(e) if e.is_numerical() => 3,
            AppError::Core(_) => 2,
            _ => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use holeburn_core::Error;

    #[test]
    fn exit_codes() {
        assert_eq!(AppError::Config("x".into()).exit_code(), 2);
        assert_eq!(AppError::from(Error::Domain("x".into())).exit_code(), 2);
        let e = Error::NumericalInstability {
            solver: "volterra",
            time: 0.1,
        };
        assert_eq!(AppError::from(e).exit_code(), 3);
        assert_eq!(AppError::VerifyFailed("x".into()).exit_code(), 1);
    }
}
