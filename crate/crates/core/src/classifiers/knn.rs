use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self { k: 5 }
    }
}

/// Brute-force k-nearest-neighbour vote under Euclidean distance. Distance
/// ties go to the lower training index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    k: usize,
    train: Matrix,
    labels: Vec<usize>,
    num_classes: usize,
}

impl Knn {
    pub(super) fn fit(
        features: &Matrix,
        labels: &[usize],
        num_classes: usize,
        params: &KnnParams,
    ) -> Result<Self> {
        if features.rows() < params.k {
            return Err(Error::TooFewInstances {
                needed: params.k,
                actual: features.rows(),
            });
        }
        Ok(Self {
            k: params.k,
            train: features.clone(),
            labels: labels.to_vec(),
            num_classes,
        })
    }

    pub fn dim(&self) -> usize {
        self.train.cols()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Training indices of the `k` nearest neighbours of `x`, nearest first.
    pub fn neighbors(&self, x: &[f64]) -> Vec<usize> {
        let mut dist: Vec<(f64, usize)> = self
            .train
            .iter_rows()
            .enumerate()
            .map(|(i, row)| {
                let d: f64 = row.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                (d, i)
            })
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < dist.len() {
            dist.select_nth_unstable_by(self.k - 1, cmp);
            dist.truncate(self.k);
        }
        dist.sort_by(cmp);
        dist.into_iter().map(|(_, i)| i).collect()
    }

    pub(super) fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let mut votes = alloc::vec![0usize; self.num_classes];
        for i in self.neighbors(x) {
            votes[self.labels[i]] += 1;
        }
        votes.iter().map(|&v| v as f64 / self.k as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn knn(points: &[f64], labels: &[usize], k: usize) -> Knn {
        let m = Matrix::from_vec(points.len(), 1, points.to_vec()).unwrap();
        Knn::fit(&m, labels, 3, &KnnParams { k }).unwrap()
    }

    #[test]
    fn unanimous_neighbours() {
        let m = knn(
            &[0.0, 0.1, 0.2, 0.3, 0.4, 9.0, 9.5],
            &[2, 2, 2, 2, 2, 0, 1],
            5,
        );
        assert_eq!(m.predict_proba(&[0.2]), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn vote_fractions() {
        let m = knn(&[0.0, 0.1, 0.2, 0.3, 0.4, 9.0], &[0, 0, 1, 1, 2, 2], 5);
        assert_eq!(m.predict_proba(&[0.2]), vec![0.4, 0.4, 0.2]);
    }

    #[test]
    fn distance_ties_prefer_lower_index() {
        // x = 0 is equidistant from -1 (index 1) and +1 (index 2).
        let m = knn(&[5.0, -1.0, 1.0], &[0, 1, 2], 1);
        assert_eq!(m.neighbors(&[0.0]), vec![1]);
        assert_eq!(m.predict_proba(&[0.0]), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn needs_k_training_points() {
        let m = Matrix::from_vec(3, 1, vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(
            Knn::fit(&m, &[0, 1, 2], 3, &KnnParams { k: 5 }),
            Err(Error::TooFewInstances {
                needed: 5,
                actual: 3
            })
        );
    }
}
