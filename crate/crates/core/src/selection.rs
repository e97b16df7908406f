//! Mutual-information feature ranking.
//!
//! Continuous features are discretised into equal-frequency (rank-based) bins
//! before the plug-in MI estimate, so scores are unaffected by the scale of
//! the embedding and by any strictly monotone transform of a feature.

use alloc::vec::Vec;

use crate::data::Dataset;
use crate::math::xlogx;
use crate::{Error, Matrix, Result};

/// Bin count used by [`select_top_k`].
pub const DEFAULT_BINS: usize = 10;

/// Assigns each value an equal-frequency bin in `[0, num_bins)`.
///
/// Values are ranked; a run of equal values takes the bin of its first rank,
/// so identical values never straddle a bin boundary.
pub fn equal_frequency_bins(values: &[f64], num_bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut bins = alloc::vec![0; n];
    let mut start = 0;
    while start < n {
        let value = values[order[start]];
        let mut end = start + 1;
        while end < n && values[order[end]] == value {
            end += 1;
        }
        let bin = start * num_bins / n;
        for &i in &order[start..end] {
            bins[i] = bin;
        }
        start = end;
    }
    bins
}

/// Plug-in mutual information (nats) between the binned feature and the label.
///
/// A constant feature scores exactly 0.
pub fn mutual_information(feature: &[f64], labels: &[usize], num_bins: usize) -> Result<f64> {
    if feature.len() != labels.len() {
        return Err(Error::LengthMismatch {
            what: "labels",
            expected: feature.len(),
            actual: labels.len(),
        });
    }
    if feature.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "feature",
            reason: "needs at least two values",
        });
    }
    if num_bins == 0 {
        return Err(Error::InvalidParameter {
            name: "num_bins",
            reason: "must be positive",
        });
    }
    let num_classes = labels.iter().max().map_or(0, |m| m + 1);
    let bins = equal_frequency_bins(feature, num_bins);
    Ok(plugin_mi(&bins, labels, num_bins, num_classes))
}

fn plugin_mi(bins: &[usize], labels: &[usize], num_bins: usize, num_classes: usize) -> f64 {
    let n = bins.len() as f64;
    let mut joint = alloc::vec![0usize; num_bins * num_classes];
    let mut bin_counts = alloc::vec![0usize; num_bins];
    let mut class_counts = alloc::vec![0usize; num_classes];
    for (&b, &c) in bins.iter().zip(labels) {
        joint[b * num_classes + c] += 1;
        bin_counts[b] += 1;
        class_counts[c] += 1;
    }
    // I(B;Y) = H(B) + H(Y) - H(B,Y), each from counts.
    let h = |counts: &[usize]| -> f64 { -counts.iter().map(|&c| xlogx(c as f64 / n)).sum::<f64>() };
    (h(&bin_counts) + h(&class_counts) - h(&joint)).max(0.0)
}

/// `round(sqrt(n))` (halves round up), clamped to `[1, dim]`.
pub fn selection_size(n: usize, dim: usize) -> usize {
    let k = libm::round(libm::sqrt(n as f64)) as usize;
    k.clamp(1, dim.max(1))
}

/// MI scores for every feature plus the indices of the top `k`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeatureRanking {
    scores: Vec<f64>,
    selected: Vec<usize>,
    train_size: usize,
}

impl FeatureRanking {
    /// Ranks features by descending score (ties to the lower index) and keeps
    /// the first `k`.
    pub fn from_scores(scores: Vec<f64>, k: usize, train_size: usize) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        order.truncate(k.min(scores.len()));
        Self {
            scores,
            selected: order,
            train_size,
        }
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Selected feature indices, best first.
    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn k(&self) -> usize {
        self.selected.len()
    }

    /// Train-set size `N` the ranking was fitted on.
    pub fn train_size(&self) -> usize {
        self.train_size
    }

    pub fn dim(&self) -> usize {
        self.scores.len()
    }

    pub fn is_selected(&self, feature: usize) -> bool {
        self.selected.contains(&feature)
    }

    pub fn project_matrix(&self, features: &Matrix) -> Result<Matrix> {
        if features.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: features.cols(),
            });
        }
        Ok(features.select_cols(&self.selected))
    }

    /// Keeps only the selected columns, in ranking order.
    pub fn project(&self, dataset: &Dataset) -> Result<Dataset> {
        dataset.with_features(self.project_matrix(dataset.features())?)
    }
}

/// Fits the ranking on a training set with [`DEFAULT_BINS`] bins and
/// `K = round(sqrt(N))`.
pub fn select_top_k(train: &Dataset) -> FeatureRanking {
    rank_features(
        train,
        DEFAULT_BINS,
        selection_size(train.len(), train.dim()),
    )
}

pub fn rank_features(train: &Dataset, num_bins: usize, k: usize) -> FeatureRanking {
    let labels = train.labels();
    let scores = (0..train.dim())
        .map(|col| {
            let bins = equal_frequency_bins(&train.features().column(col), num_bins.max(1));
            if train.len() < 2 {
                0.0
            } else {
                plugin_mi(&bins, labels, num_bins.max(1), train.num_classes())
            }
        })
        .collect();
    FeatureRanking::from_scores(scores, k, train.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate_synthetic;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_feature_has_zero_information() {
        let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
        assert_eq!(mutual_information(&[4.2; 30], &labels, 10).unwrap(), 0.0);
    }

    #[test]
    fn copied_label_recovers_label_entropy() {
        // Joint histogram: three occupied bins, each holding one class with
        // probability 1/3, so I = H(Y) = ln 3.
        let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let feature: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
        let mi = mutual_information(&feature, &labels, 10).unwrap();
        assert!((mi - 3f64.ln()).abs() < 1e-12, "{mi}");
    }

    #[test]
    fn independent_feature_is_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let labels: Vec<usize> = (0..10_000).map(|_| rng.random_range(0..3)).collect();
        let feature: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let mi = mutual_information(&feature, &labels, 10).unwrap();
        assert!(mi < 0.01, "{mi}");
    }

    #[test]
    fn rejects_mismatched_lengths() {
        assert!(matches!(
            mutual_information(&[1.0, 2.0], &[0], 10),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn equal_values_share_a_bin() {
        let bins = equal_frequency_bins(&[1.0, 1.0, 1.0, 2.0, 3.0], 5);
        assert_eq!(bins, vec![0, 0, 0, 3, 4]);
    }

    #[test]
    fn selection_size_rounds_and_clamps() {
        assert_eq!(selection_size(2814, 512), 53);
        assert_eq!(selection_size(100, 5), 5);
        assert_eq!(selection_size(1, 5), 1);
        // sqrt(12.25) = 3.5 rounds up
        assert_eq!(selection_size(1200, 64), 35);
    }

    #[test]
    fn planted_feature_ranks_first() {
        let base = generate_synthetic(&[40, 40, 40], 10, 0.0, 5).unwrap();
        let mut rows = Vec::new();
        for (i, r) in base.features().iter_rows().enumerate() {
            let mut r = r.to_vec();
            r[6] = base.labels()[i] as f64;
            rows.push(r);
        }
        let ds = base
            .with_features(Matrix::from_rows(&rows).unwrap())
            .unwrap();
        let ranking = select_top_k(&ds);
        assert_eq!(ranking.k(), 10);
        assert_eq!(ranking.selected()[0], 6);
    }

    #[test]
    fn ties_break_to_lower_index() {
        let r = FeatureRanking::from_scores(vec![0.1, 0.3, 0.3, 0.2], 3, 9);
        assert_eq!(r.selected(), &[1, 2, 3]);
    }

    #[test]
    fn projection_keeps_ranked_columns() {
        let ds = generate_synthetic(&[20, 20, 20], 8, 3.0, 1).unwrap();
        let ranking = rank_features(&ds, 10, 3);
        let projected = ranking.project(&ds).unwrap();
        assert_eq!(projected.dim(), 3);
        for (col, &src) in ranking.selected().iter().enumerate() {
            assert_eq!(projected.features().column(col), ds.features().column(src));
        }
        let rerank = rank_features(&projected, 10, 3);
        let mut again: Vec<usize> = rerank
            .selected()
            .iter()
            .map(|&c| ranking.selected()[c])
            .collect();
        let mut first = ranking.selected().to_vec();
        again.sort_unstable();
        first.sort_unstable();
        assert_eq!(again, first);
    }
}
