use std::path::PathBuf;

use alvi_core::active::Scenario;
use alvi_core::classifiers::Algorithm;

use crate::DataError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error in {}: {source}", path.display())]
    Data { path: PathBuf, source: DataError },
    #[error("data error: {0}")]
    Dataset(alvi_core::Error),
    #[error("fold {fold}{}: {source}", run_context(*scenario, *algorithm))]
    Run {
        fold: usize,
        scenario: Option<Scenario>,
        algorithm: Option<Algorithm>,
        source: alvi_core::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn run_context(scenario: Option<Scenario>, algorithm: Option<Algorithm>) -> String {
    match (scenario, algorithm) {
        (Some(s), Some(a)) => format!(", scenario {s}, algorithm {a}"),
        (Some(s), None) => format!(", scenario {s}"),
        _ => String::new(),
    }
}

impl HarnessError {
    /// Process exit status: 1 configuration, 2 data, 3 runtime.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Data { .. } | HarnessError::Dataset(_) => 2,
            HarnessError::Run { .. } | HarnessError::Io { .. } => 3,
        }
    }
}
