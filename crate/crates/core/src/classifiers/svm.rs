use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Standardizer;
use crate::math::{axpy, dot, softmax_in_place};
use crate::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    /// L2 regularisation weight.
    pub lambda: f64,
    pub epochs: usize,
    /// Base step; update `t` uses `step / sqrt(t)`.
    pub step: f64,
    /// Seeds the per-epoch visiting order.
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            lambda: 1e-4,
            epochs: 50,
            step: 0.1,
            seed: 0,
        }
    }
}

/// One-vs-rest linear SVMs trained by stochastic subgradient descent on the
/// L2-regularised hinge loss. Probabilities are the softmax of the class
/// margins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    scaler: Standardizer,
    weights: Matrix,
    biases: Vec<f64>,
}

impl LinearSvm {
    pub(super) fn fit(
        features: &Matrix,
        labels: &[usize],
        num_classes: usize,
        params: &SvmParams,
    ) -> Self {
        Self::fit_with_trace(features, labels, num_classes, params).0
    }

    /// Also returns, per epoch, the mean over visited samples of
    /// `sum_c [lambda/2 |w_c|^2 + hinge_c]`, each term measured just before
    /// that sample's update.
    pub fn fit_with_trace(
        features: &Matrix,
        labels: &[usize],
        num_classes: usize,
        params: &SvmParams,
    ) -> (Self, Vec<f64>) {
        let scaler = Standardizer::fit(features);
        let x = scaler.transform(features);
        let d = x.cols();
        let mut weights = Matrix::zeros(num_classes, d);
        let mut biases = alloc::vec![0.0; num_classes];
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut order: Vec<usize> = (0..x.rows()).collect();
        let mut trace = Vec::with_capacity(params.epochs);
        let mut t = 0usize;
        for _ in 0..params.epochs {
            order.shuffle(&mut rng);
            let mut objective = 0.0;
            for &i in &order {
                t += 1;
                let eta = params.step / libm::sqrt(t as f64);
                let row = x.row(i);
                for (c, bias) in biases.iter_mut().enumerate() {
                    let y = if labels[i] == c { 1.0 } else { -1.0 };
                    let w = weights.row_mut(c);
                    let margin = y * (dot(w, row) + *bias);
                    let norm_sq = dot(w, w);
                    objective += 0.5 * params.lambda * norm_sq + (1.0 - margin).max(0.0);
                    let shrink = 1.0 - eta * params.lambda;
                    w.iter_mut().for_each(|v| *v *= shrink);
                    if margin < 1.0 {
                        axpy(eta * y, row, w);
                        *bias += eta * y;
                    }
                }
            }
            trace.push(objective / order.len().max(1) as f64);
        }
        (
            Self {
                scaler,
                weights,
                biases,
            },
            trace,
        )
    }

    pub fn dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn num_classes(&self) -> usize {
        self.biases.len()
    }

    /// Raw one-vs-rest margins `w_c . z(x) + b_c` on the standardised input.
    pub fn margins(&self, x: &[f64]) -> Vec<f64> {
        let mut z = alloc::vec![0.0; x.len()];
        self.scaler.transform_into(x, &mut z);
        (0..self.num_classes())
            .map(|c| dot(self.weights.row(c), &z) + self.biases[c])
            .collect()
    }

    pub(super) fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let mut m = self.margins(x);
        softmax_in_place(&mut m);
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate_synthetic;
    use crate::math::argmax;

    #[test]
    fn separates_wide_blobs() {
        let ds = generate_synthetic(&[60, 60, 60], 4, 8.0, 3).unwrap();
        let svm = LinearSvm::fit(ds.features(), ds.labels(), 3, &SvmParams::default());
        let correct = ds
            .features()
            .iter_rows()
            .zip(ds.labels())
            .filter(|(x, &y)| argmax(&svm.predict_proba(x)) == y)
            .count();
        assert!(correct as f64 / ds.len() as f64 >= 0.99, "{correct}");
    }

    #[test]
    fn objective_does_not_increase_early() {
        for seed in 0..5 {
            let ds = generate_synthetic(&[50, 50, 50], 3, 8.0, seed).unwrap();
            let params = SvmParams {
                seed,
                ..SvmParams::default()
            };
            let (_, trace) = LinearSvm::fit_with_trace(ds.features(), ds.labels(), 3, &params);
            for w in trace[..10].windows(2) {
                assert!(w[1] <= w[0], "seed {seed}: {trace:?}");
            }
        }
    }
}
