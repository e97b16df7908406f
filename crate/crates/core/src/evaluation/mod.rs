//! AUC ROC, Wilcoxon signed-rank tests and learning-curve significance.

mod auc;
mod quartile;
mod wilcoxon;

pub use auc::{auc_roc_binary, auc_roc_ovr_weighted, ScoreMatrix};
pub use quartile::{quartile_improvement, quartile_improvement_test, MIN_CURVE_LEN};
pub use wilcoxon::{
    exact_null_counts, wilcoxon_signed_rank, WilcoxonMethod, WilcoxonResult, EXACT_MAX_N,
};
