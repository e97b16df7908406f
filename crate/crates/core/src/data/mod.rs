//! Datasets, fold roles, the simulated oracle and synthetic data.

mod dataset;
mod folds;
mod oracle;
mod synthetic;

pub use dataset::{Dataset, UnlabeledPool};
pub use folds::{split_roles, stratified_kfold, FoldAssignment, SplitIndices, SplitRoles};
pub use oracle::LabelOracle;
pub use synthetic::generate_synthetic;
