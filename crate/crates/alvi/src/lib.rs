//! Experiment harness for the `alvi-core` active-learning algorithms: feature
//! CSV interchange, JSON configuration, fold-parallel orchestration and
//! CSV/JSON report rendering.

pub mod config;
pub mod dataset_csv;
mod error;
pub mod experiment;
pub mod report;

pub use config::{ExperimentConfig, InputSpec, SyntheticSpec};
pub use dataset_csv::{
    load_feature_csv, read_feature_csv, write_feature_csv, write_ranking_csv, DataError,
};
pub use error::HarnessError;
pub use experiment::{run_experiment, run_experiment_on, ExperimentReport, RunKey};
pub use report::{load_report, render_reports};
