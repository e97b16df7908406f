use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::data::LabelOracle;
use crate::{Error, Matrix, Result};

/// Immutable table of feature vectors with dense class labels and unique ids.
///
/// Construction enforces: matching lengths, `n >= 1`, labels in `[0, C)`, every
/// class present, pairwise distinct ids and finite features.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    ids: Vec<String>,
    features: Matrix,
    labels: Vec<usize>,
    num_classes: usize,
}

impl Dataset {
    pub fn new(
        ids: Vec<String>,
        features: Matrix,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if features.rows() != n {
            return Err(Error::LengthMismatch {
                what: "feature matrix",
                expected: n,
                actual: features.rows(),
            });
        }
        if labels.len() != n {
            return Err(Error::LengthMismatch {
                what: "labels",
                expected: n,
                actual: labels.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        for (row, values) in features.iter_rows().enumerate() {
            if let Some(column) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row, column });
            }
        }
        let mut present = alloc::vec![false; num_classes];
        for (row, &label) in labels.iter().enumerate() {
            if label >= num_classes {
                return Err(Error::LabelOutOfRange {
                    row,
                    label,
                    num_classes,
                });
            }
            present[label] = true;
        }
        if let Some(class) = present.iter().position(|p| !p) {
            return Err(Error::MissingClass(class));
        }
        Ok(Self {
            ids,
            features,
            labels,
            num_classes,
        })
    }

    /// Like [`Dataset::new`] with `C = max(label) + 1`.
    pub fn with_inferred_classes(
        ids: Vec<String>,
        features: Matrix,
        labels: Vec<usize>,
    ) -> Result<Self> {
        let num_classes = labels.iter().max().map_or(0, |m| m + 1);
        Self::new(ids, features, labels, num_classes)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0; self.num_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at `indices`, keeping the class count. Fails if a class ends up
    /// absent from the subset.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            indices.iter().map(|&i| self.ids[i].clone()).collect(),
            self.features.select_rows(indices),
            indices.iter().map(|&i| self.labels[i]).collect(),
            self.num_classes,
        )
    }

    /// Same ids and labels with a replacement feature matrix.
    pub fn with_features(&self, features: Matrix) -> Result<Self> {
        Self::new(
            self.ids.clone(),
            features,
            self.labels.clone(),
            self.num_classes,
        )
    }

    /// Hides the labels: returns the unlabeled view and an oracle that answers
    /// for exactly these instances.
    pub fn into_unlabeled(self) -> (UnlabeledPool, LabelOracle) {
        let oracle = LabelOracle::new(self.ids.iter().cloned().zip(self.labels.iter().copied()));
        (
            UnlabeledPool {
                ids: self.ids,
                features: self.features,
            },
            oracle,
        )
    }
}

/// Pool instances whose labels are only available through a [`LabelOracle`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledPool {
    ids: Vec<String>,
    features: Matrix,
}

impl UnlabeledPool {
    pub fn new(ids: Vec<String>, features: Matrix) -> Result<Self> {
        if ids.len() != features.rows() {
            return Err(Error::LengthMismatch {
                what: "feature matrix",
                expected: ids.len(),
                actual: features.rows(),
            });
        }
        Ok(Self { ids, features })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }
}
