use alloc::vec::Vec;

use crate::classifiers::ProbabilityVector;
use crate::{Error, Matrix, Result};

/// Per-class scores for `n` instances plus their true labels.
///
/// Rows sum to 1 within `1e-9`, `n >= 2` and at least two distinct labels occur.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    scores: Matrix,
    labels: Vec<usize>,
}

impl ScoreMatrix {
    pub fn new(scores: Matrix, labels: Vec<usize>) -> Result<Self> {
        if scores.rows() != labels.len() {
            return Err(Error::LengthMismatch {
                what: "labels",
                expected: scores.rows(),
                actual: labels.len(),
            });
        }
        if labels.len() < 2 {
            return Err(Error::UndefinedAuc("fewer than two instances"));
        }
        for row in scores.iter_rows() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ProbabilityVector::SUM_TOLERANCE {
                return Err(Error::InvalidProbabilities);
            }
        }
        if let Some((row, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= scores.cols()) {
            return Err(Error::LabelOutOfRange {
                row,
                label,
                num_classes: scores.cols(),
            });
        }
        if labels.iter().all(|&l| l == labels[0]) {
            return Err(Error::UndefinedAuc("only one class present"));
        }
        Ok(Self { scores, labels })
    }

    pub fn from_probabilities(rows: &[ProbabilityVector], labels: Vec<usize>) -> Result<Self> {
        let scores = Matrix::from_rows(&rows.iter().map(|p| p.as_slice()).collect::<Vec<_>>())
            .ok_or(Error::InvalidProbabilities)?;
        Self::new(scores, labels)
    }

    pub fn scores(&self) -> &Matrix {
        &self.scores
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.scores.cols()
    }
}

/// Probability that a random positive outscores a random negative, ties
/// counted one half (the Mann-Whitney form), computed from average ranks.
pub fn auc_roc_binary(scores: &[f64], positives: &[bool]) -> Result<f64> {
    if scores.len() != positives.len() {
        return Err(Error::LengthMismatch {
            what: "labels",
            expected: scores.len(),
            actual: positives.len(),
        });
    }
    let n_pos = positives.iter().filter(|&&p| p).count();
    let n_neg = positives.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedAuc(
            "needs at least one positive and one negative",
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Sum of 1-based ranks of the positives, ties sharing their mean rank.
    // Ranks are kept doubled so the sum stays an exact integer.
    let mut doubled_rank_sum: u64 = 0;
    let mut start = 0;
    while start < order.len() {
        let value = scores[order[start]];
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == value {
            end += 1;
        }
        let doubled_mean_rank = (start + 1 + end) as u64;
        let pos_in_group = order[start..end].iter().filter(|&&i| positives[i]).count() as u64;
        doubled_rank_sum += doubled_mean_rank * pos_in_group;
        start = end;
    }
    let p = n_pos as f64;
    let u = doubled_rank_sum as f64 / 2.0 - p * (p + 1.0) / 2.0;
    Ok(u / (p * n_neg as f64))
}

/// One-vs-rest AUC per class, averaged with weights `n_c / n`.
///
/// Accumulated as `sum_c n_c * auc_c` before dividing by `n`, so perfect
/// rankings give exactly 1 and all-tied scores exactly 0.5.
pub fn auc_roc_ovr_weighted(scores: &ScoreMatrix) -> Result<f64> {
    let n = scores.labels.len();
    let mut total = 0.0;
    let mut column = alloc::vec![0.0; n];
    let mut positives = alloc::vec![false; n];
    for class in 0..scores.num_classes() {
        let support = scores.labels.iter().filter(|&&l| l == class).count();
        if support == 0 {
            return Err(Error::UndefinedAuc("a class has no true instances"));
        }
        for i in 0..n {
            column[i] = scores.scores.get(i, class);
            positives[i] = scores.labels[i] == class;
        }
        total += support as f64 * auc_roc_binary(&column, &positives)?;
    }
    Ok(total / n as f64)
}
