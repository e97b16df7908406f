use crate::active::LearningCurve;
use crate::evaluation::{wilcoxon_signed_rank, WilcoxonResult};
use crate::{Error, Result};

/// Shortest AUC sequence the quartile test accepts.
pub const MIN_CURVE_LEN: usize = 8;

/// Wilcoxon test between the first and last quarters of an AUC sequence,
/// paired position-wise (`values[i]` with `values[m - q + i]`, `q = m / 4`).
pub fn quartile_improvement(values: &[f64]) -> Result<WilcoxonResult> {
    let m = values.len();
    if m < MIN_CURVE_LEN {
        return Err(Error::CurveTooShort { len: m });
    }
    let q = m / 4;
    wilcoxon_signed_rank(&values[..q], &values[m - q..])
}

/// [`quartile_improvement`] over the test AUCs recorded after each labeling.
pub fn quartile_improvement_test(curve: &LearningCurve) -> Result<WilcoxonResult> {
    quartile_improvement(&curve.auc_trajectory())
}
