use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::Standardizer;
use crate::math::{axpy, dot, gemm, softmax_in_place};
use crate::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpParams {
    pub hidden: usize,
    pub epochs: usize,
    pub step: f64,
    pub batch_size: usize,
    /// Seeds weight initialisation and mini-batch shuffling.
    pub seed: u64,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self {
            hidden: 64,
            epochs: 100,
            step: 0.01,
            batch_size: 32,
            seed: 0,
        }
    }
}

/// Parameters of a one-hidden-layer ReLU network with a softmax output.
///
/// `w1` is `input x hidden` and `w2` is `classes x hidden`, both row-major.
/// The same layout holds gradients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpWeights {
    input: usize,
    hidden: usize,
    classes: usize,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

/// Buffers for one mini-batch of `rows` instances.
struct BatchScratch {
    rows: usize,
    inputs: Vec<f64>,
    pre: Vec<f64>,
    act: Vec<f64>,
    logits: Vec<f64>,
    d_hidden: Vec<f64>,
}

impl BatchScratch {
    fn new(rows: usize, weights: &MlpWeights) -> Self {
        Self {
            rows,
            inputs: alloc::vec![0.0; rows * weights.input],
            pre: alloc::vec![0.0; rows * weights.hidden],
            act: alloc::vec![0.0; rows * weights.hidden],
            logits: alloc::vec![0.0; rows * weights.classes],
            d_hidden: alloc::vec![0.0; rows * weights.hidden],
        }
    }

    /// Copies the given rows of `x` into `inputs` and shrinks the logical size.
    fn gather(&mut self, x: &Matrix, indices: &[usize]) {
        let d = x.cols();
        self.rows = indices.len();
        for (b, &i) in indices.iter().enumerate() {
            self.inputs[b * d..(b + 1) * d].copy_from_slice(x.row(i));
        }
    }
}

impl MlpWeights {
    pub fn zeros(input: usize, hidden: usize, classes: usize) -> Self {
        Self {
            input,
            hidden,
            classes,
            w1: alloc::vec![0.0; input * hidden],
            b1: alloc::vec![0.0; hidden],
            w2: alloc::vec![0.0; classes * hidden],
            b2: alloc::vec![0.0; classes],
        }
    }

    /// He-normal weights, zero biases.
    pub fn random<R: Rng>(input: usize, hidden: usize, classes: usize, rng: &mut R) -> Self {
        let mut w = Self::zeros(input, hidden, classes);
        let first = Normal::new(0.0, libm::sqrt(2.0 / input.max(1) as f64)).expect("finite std");
        let second = Normal::new(0.0, libm::sqrt(2.0 / hidden as f64)).expect("finite std");
        w.w1.iter_mut().for_each(|v| *v = first.sample(rng));
        w.w2.iter_mut().for_each(|v| *v = second.sample(rng));
        w
    }

    pub fn input(&self) -> usize {
        self.input
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    /// All parameters flattened as `w1, b1, w2, b2`.
    pub fn parameters(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.len());
        p.extend_from_slice(&self.w1);
        p.extend_from_slice(&self.b1);
        p.extend_from_slice(&self.w2);
        p.extend_from_slice(&self.b2);
        p
    }

    /// Inverse of [`MlpWeights::parameters`]. Panics on a length mismatch.
    pub fn set_parameters(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.len(), "parameter count mismatch");
        let (w1, rest) = values.split_at(self.w1.len());
        let (b1, rest) = rest.split_at(self.b1.len());
        let (w2, b2) = rest.split_at(self.w2.len());
        self.w1.copy_from_slice(w1);
        self.b1.copy_from_slice(b1);
        self.w2.copy_from_slice(w2);
        self.b2.copy_from_slice(b2);
    }

    pub fn len(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `self -= step * grad`
    #[inline(always)]
    fn descend(&mut self, grad: &MlpWeights, step: f64) {
        axpy(-step, &grad.w1, &mut self.w1);
        axpy(-step, &grad.b1, &mut self.b1);
        axpy(-step, &grad.w2, &mut self.w2);
        axpy(-step, &grad.b2, &mut self.b2);
    }

    /// Mean cross-entropy of the batch held in `s`; overwrites `grad` with its
    /// gradient.
    #[inline(always)]
    fn batch_gradient(&self, labels: &[usize], grad: &mut MlpWeights, s: &mut BatchScratch) -> f64 {
        let (n, d, h, c) = (s.rows, self.input, self.hidden, self.classes);
        let (pre, act) = (&mut s.pre[..n * h], &mut s.act[..n * h]);
        let logits = &mut s.logits[..n * c];
        let d_hidden = &mut s.d_hidden[..n * h];

        for row in pre.chunks_exact_mut(h) {
            row.copy_from_slice(&self.b1);
        }
        gemm(n, d, h, &s.inputs, false, &self.w1, false, 1.0, pre);
        for (a, &z) in act.iter_mut().zip(pre.iter()) {
            *a = z.max(0.0);
        }
        for (row, a) in logits.chunks_exact_mut(c).zip(act.chunks_exact(h)) {
            for (k, z) in row.iter_mut().enumerate() {
                *z = self.b2[k] + dot(&self.w2[k * h..(k + 1) * h], a);
            }
        }

        // Softmax cross-entropy; logits become dloss/dlogits.
        let scale = 1.0 / n as f64;
        let mut loss = 0.0;
        grad.b2.iter_mut().for_each(|v| *v = 0.0);
        for (row, &label) in logits.chunks_exact_mut(c).zip(labels) {
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            loss += max - row[label];
            let mut sum_exp = 0.0;
            for z in row.iter_mut() {
                *z = libm::exp(*z - max);
                sum_exp += *z;
            }
            loss += libm::log(sum_exp);
            for (k, z) in row.iter_mut().enumerate() {
                *z = scale * (*z / sum_exp - if k == label { 1.0 } else { 0.0 });
            }
            axpy(1.0, row, &mut grad.b2);
        }

        grad.w2.iter_mut().for_each(|v| *v = 0.0);
        d_hidden.iter_mut().for_each(|v| *v = 0.0);
        for ((dz, a), dh) in logits
            .chunks_exact(c)
            .zip(act.chunks_exact(h))
            .zip(d_hidden.chunks_exact_mut(h))
        {
            for (k, &g) in dz.iter().enumerate() {
                axpy(g, a, &mut grad.w2[k * h..(k + 1) * h]);
                axpy(g, &self.w2[k * h..(k + 1) * h], dh);
            }
        }
        for (g, &z) in d_hidden.iter_mut().zip(pre.iter()) {
            if z <= 0.0 {
                *g = 0.0;
            }
        }
        grad.b1.iter_mut().for_each(|v| *v = 0.0);
        for row in d_hidden.chunks_exact(h) {
            axpy(1.0, row, &mut grad.b1);
        }
        gemm(d, n, h, &s.inputs, true, d_hidden, false, 0.0, &mut grad.w1);
        loss * scale
    }

    /// Mean cross-entropy over all rows and its gradient.
    pub fn loss_and_gradient(&self, x: &Matrix, labels: &[usize]) -> (f64, MlpWeights) {
        let mut grad = Self::zeros(self.input, self.hidden, self.classes);
        let mut s = BatchScratch::new(x.rows(), self);
        s.inputs.copy_from_slice(x.as_slice());
        let loss = self.batch_gradient(labels, &mut grad, &mut s);
        (loss, grad)
    }

    /// Mean cross-entropy over all rows.
    pub fn loss(&self, x: &Matrix, labels: &[usize]) -> f64 {
        self.loss_and_gradient(x, labels).0
    }

    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let h = self.hidden;
        let mut act = self.b1.clone();
        for (j, &xj) in x.iter().enumerate() {
            axpy(xj, &self.w1[j * h..(j + 1) * h], &mut act);
        }
        act.iter_mut().for_each(|a| *a = a.max(0.0));
        let mut logits: Vec<f64> = (0..self.classes)
            .map(|c| dot(&self.w2[c * h..(c + 1) * h], &act) + self.b2[c])
            .collect();
        softmax_in_place(&mut logits);
        logits
    }
}

/// One-hidden-layer perceptron trained by mini-batch gradient descent on
/// cross-entropy, applied to standardised inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    scaler: Standardizer,
    weights: MlpWeights,
}

impl Mlp {
    pub(super) fn fit(
        features: &Matrix,
        labels: &[usize],
        num_classes: usize,
        params: &MlpParams,
    ) -> Self {
        let scaler = Standardizer::fit(features);
        let x = scaler.transform(features);
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut weights = MlpWeights::random(x.cols(), params.hidden, num_classes, &mut rng);
        train(&mut weights, &x, labels, params, &mut rng);
        Self { scaler, weights }
    }

    pub fn dim(&self) -> usize {
        self.weights.input
    }

    pub fn num_classes(&self) -> usize {
        self.weights.classes
    }

    pub fn weights(&self) -> &MlpWeights {
        &self.weights
    }

    pub(super) fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let mut z = alloc::vec![0.0; x.len()];
        self.scaler.transform_into(x, &mut z);
        self.weights.predict_proba(&z)
    }
}

/// Mini-batch gradient descent over shuffled epochs.
fn train(
    weights: &mut MlpWeights,
    x: &Matrix,
    labels: &[usize],
    params: &MlpParams,
    rng: &mut ChaCha8Rng,
) {
    #[cfg(all(feature = "std", target_arch = "x86_64"))]
    if std::is_x86_feature_detected!("avx2") && std::is_x86_feature_detected!("fma") {
        // SAFETY: the CPU supports the features the clone was compiled for.
        return unsafe { train_avx2(weights, x, labels, params, rng) };
    }
    train_body(weights, x, labels, params, rng);
}

/// [`train_body`] generated with AVX2 enabled. Rust never contracts `a * b + c`
/// into a fused multiply-add, so results are bit-identical.
#[cfg(all(feature = "std", target_arch = "x86_64"))]
#[target_feature(enable = "avx2,fma")]
unsafe fn train_avx2(
    weights: &mut MlpWeights,
    x: &Matrix,
    labels: &[usize],
    params: &MlpParams,
    rng: &mut ChaCha8Rng,
) {
    train_body(weights, x, labels, params, rng);
}

#[inline(always)]
fn train_body(
    weights: &mut MlpWeights,
    x: &Matrix,
    labels: &[usize],
    params: &MlpParams,
    rng: &mut ChaCha8Rng,
) {
    let mut grad = MlpWeights::zeros(x.cols(), weights.hidden, weights.classes);
    let mut scratch = BatchScratch::new(params.batch_size, weights);
    let mut order: Vec<usize> = (0..x.rows()).collect();
    let mut batch_labels = Vec::with_capacity(params.batch_size);
    for _ in 0..params.epochs {
        order.shuffle(rng);
        for batch in order.chunks(params.batch_size) {
            scratch.gather(x, batch);
            batch_labels.clear();
            batch_labels.extend(batch.iter().map(|&i| labels[i]));
            weights.batch_gradient(&batch_labels, &mut grad, &mut scratch);
            weights.descend(&grad, params.step);
        }
    }
}
