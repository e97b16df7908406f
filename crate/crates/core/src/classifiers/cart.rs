use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::normalized_counts;
use crate::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CartParams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for CartParams {
    fn default() -> Self {
        Self {
            max_depth: 12,
            min_leaf: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        proba: Vec<f64>,
    },
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Binary classification tree grown greedily on Gini impurity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    dim: usize,
    num_classes: usize,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    /// `sum_c n_lc^2 / n_l + sum_c n_rc^2 / n_r`; larger means purer children.
    purity: f64,
}

struct Builder<'a> {
    features: &'a Matrix,
    labels: &'a [usize],
    num_classes: usize,
    params: &'a CartParams,
    nodes: Vec<Node>,
    goes_left: Vec<bool>,
}

impl DecisionTree {
    pub(super) fn fit(
        features: &Matrix,
        labels: &[usize],
        num_classes: usize,
        params: &CartParams,
    ) -> Self {
        let d = features.cols();
        // One index list per feature, each sorted by that feature; splits
        // partition them stably so no node re-sorts.
        let sorted: Vec<Vec<usize>> = (0..d)
            .map(|f| {
                let mut idx: Vec<usize> = (0..features.rows()).collect();
                idx.sort_by(|&a, &b| {
                    features
                        .get(a, f)
                        .total_cmp(&features.get(b, f))
                        .then(a.cmp(&b))
                });
                idx
            })
            .collect();
        let mut builder = Builder {
            features,
            labels,
            num_classes,
            params,
            nodes: Vec::new(),
            goes_left: alloc::vec![false; features.rows()],
        };
        let all: Vec<usize> = (0..features.rows()).collect();
        builder.grow(all, sorted, 0);
        Self {
            nodes: builder.nodes,
            dim: d,
            num_classes,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// The root node; index 0.
    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub(super) fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { proba } => return proba.clone(),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
            }
        }
    }
}

impl Builder<'_> {
    /// Appends the subtree for `members` and returns its node index.
    fn grow(&mut self, members: Vec<usize>, sorted: Vec<Vec<usize>>, depth: usize) -> usize {
        let mut counts = alloc::vec![0usize; self.num_classes];
        for &i in &members {
            counts[self.labels[i]] += 1;
        }
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let n = members.len();
        let split = if pure || depth >= self.params.max_depth || n < 2 * self.params.min_leaf {
            None
        } else {
            self.best_split(&sorted, &counts)
        };

        let index = self.nodes.len();
        let Some(split) = split else {
            self.nodes.push(Node::Leaf {
                proba: normalized_counts(&counts),
            });
            return index;
        };
        // Placeholder, patched once the children exist.
        self.nodes.push(Node::Leaf { proba: Vec::new() });

        for &i in &members {
            self.goes_left[i] = self.features.get(i, split.feature) <= split.threshold;
        }
        let (left_members, right_members): (Vec<usize>, Vec<usize>) =
            members.iter().partition(|&&i| self.goes_left[i]);
        let mut left_sorted = Vec::with_capacity(sorted.len());
        let mut right_sorted = Vec::with_capacity(sorted.len());
        for list in sorted {
            let (l, r): (Vec<usize>, Vec<usize>) =
                list.into_iter().partition(|&i| self.goes_left[i]);
            left_sorted.push(l);
            right_sorted.push(r);
        }
        let left = self.grow(left_members, left_sorted, depth + 1);
        let right = self.grow(right_members, right_sorted, depth + 1);
        self.nodes[index] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        index
    }

    /// Lowest weighted Gini impurity over all features and midpoints between
    /// consecutive distinct values. Ties keep the lower feature index and then
    /// the lower threshold. A zero-gain split is still taken, so impure nodes
    /// keep splitting while distinct feature vectors remain.
    fn best_split(&self, sorted: &[Vec<usize>], totals: &[usize]) -> Option<Candidate> {
        let min_leaf = self.params.min_leaf;
        let mut best: Option<Candidate> = None;
        let mut left = alloc::vec![0usize; self.num_classes];
        for (feature, order) in sorted.iter().enumerate() {
            let n = order.len();
            left.iter_mut().for_each(|c| *c = 0);
            let mut left_sq = 0.0;
            let mut right_sq: f64 = totals.iter().map(|&c| (c * c) as f64).sum();
            for pos in 0..n - 1 {
                let label = self.labels[order[pos]];
                let (l, r) = (left[label] as f64, (totals[label] - left[label]) as f64);
                left_sq += 2.0 * l + 1.0;
                right_sq -= 2.0 * r - 1.0;
                left[label] += 1;

                let n_left = pos + 1;
                let n_right = n - n_left;
                if n_left < min_leaf || n_right < min_leaf {
                    continue;
                }
                let lo = self.features.get(order[pos], feature);
                let hi = self.features.get(order[pos + 1], feature);
                if lo >= hi {
                    continue;
                }
                let purity = left_sq / n_left as f64 + right_sq / n_right as f64;
                if best.as_ref().is_none_or(|b| purity > b.purity) {
                    let mid = lo + (hi - lo) / 2.0;
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some(Candidate {
                        feature,
                        threshold,
                        purity,
                    });
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unlimited() -> CartParams {
        CartParams {
            max_depth: usize::MAX,
            min_leaf: 1,
        }
    }

    #[test]
    fn splits_root_on_informative_feature() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
        let y = [0, 0, 1, 1];
        let tree = DecisionTree::fit(&x, &y, 2, &unlimited());
        match tree.root() {
            Node::Split {
                feature, threshold, ..
            } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 0.5);
            }
            other => panic!("expected split, got {other:?}"),
        }
        for (row, &label) in x.iter_rows().zip(&y) {
            assert_eq!(tree.predict_proba(row)[label], 1.0);
        }
    }

    #[test]
    fn xor_is_fit_exactly() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
        let y = [0, 1, 1, 0];
        let tree = DecisionTree::fit(&x, &y, 2, &unlimited());
        for (row, &label) in x.iter_rows().zip(&y) {
            assert_eq!(tree.predict_proba(row)[label], 1.0);
        }
    }

    #[test]
    fn depth_limit_is_respected() {
        let x = Matrix::from_rows(&(0..64).map(|i| [i as f64]).collect::<Vec<_>>()).unwrap();
        let y: Vec<usize> = (0..64).map(|i| i % 2).collect();
        let params = CartParams {
            max_depth: 3,
            min_leaf: 1,
        };
        let tree = DecisionTree::fit(&x, &y, 2, &params);
        assert!(tree.depth() <= 3);
    }

    #[test]
    fn leaves_hold_class_frequencies() {
        let x = Matrix::from_rows(&[[0.0], [0.0], [0.0], [1.0]]).unwrap();
        let tree = DecisionTree::fit(&x, &[0, 0, 1, 1], 2, &unlimited());
        assert_eq!(tree.predict_proba(&[0.0]), vec![2.0 / 3.0, 1.0 / 3.0]);
        assert_eq!(tree.predict_proba(&[1.0]), vec![0.0, 1.0]);
    }

    #[test]
    fn adjacent_floats_do_not_misroute() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let x = Matrix::from_rows(&[[a], [b]]).unwrap();
        let tree = DecisionTree::fit(&x, &[0, 1], 2, &unlimited());
        assert_eq!(tree.predict_proba(&[a]), vec![1.0, 0.0]);
        assert_eq!(tree.predict_proba(&[b]), vec![0.0, 1.0]);
    }
}
