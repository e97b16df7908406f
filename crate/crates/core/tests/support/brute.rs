//! Deliberately naive reference implementations, shared by test targets.

#![allow(dead_code)]

use alvi_core::classifiers::MlpWeights;
use alvi_core::Matrix;

/// Weighted one-vs-rest AUC by counting every positive/negative pair.
pub fn auc(scores: &Matrix, labels: &[usize]) -> f64 {
    let n = labels.len();
    let mut total = 0.0;
    for c in 0..scores.cols() {
        let (mut wins, mut pairs) = (0.0, 0.0);
        for i in (0..n).filter(|&i| labels[i] == c) {
            for j in (0..n).filter(|&j| labels[j] != c) {
                let (si, sj) = (scores.get(i, c), scores.get(j, c));
                wins += if si > sj {
                    1.0
                } else if si == sj {
                    0.5
                } else {
                    0.0
                };
                pairs += 1.0;
            }
        }
        let support = labels.iter().filter(|&&l| l == c).count() as f64;
        total += support / n as f64 * wins / pairs;
    }
    total
}

/// Two-sided exact p-value by listing all sign assignments.
pub fn wilcoxon_p(diffs: &[f64]) -> f64 {
    let d: Vec<f64> = diffs.iter().copied().filter(|x| *x != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return 1.0;
    }
    let ranks: Vec<f64> = d
        .iter()
        .map(|x| {
            let below = d.iter().filter(|y| y.abs() < x.abs()).count();
            let equal = d.iter().filter(|y| y.abs() == x.abs()).count();
            below as f64 + (equal as f64 + 1.0) / 2.0
        })
        .collect();
    let observed: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(x, _)| **x > 0.0)
        .map(|(_, r)| r)
        .sum();
    let (mut low, mut high) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        let w: f64 = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| ranks[i])
            .sum();
        low += u64::from(w <= observed);
        high += u64::from(w >= observed);
    }
    (2.0 * low.min(high) as f64 / (1u64 << n) as f64).min(1.0)
}

pub fn knn_proba(
    train: &Matrix,
    labels: &[usize],
    classes: usize,
    k: usize,
    x: &[f64],
) -> Vec<f64> {
    let mut order: Vec<(f64, usize)> = train
        .iter_rows()
        .enumerate()
        .map(|(i, row)| (row.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum(), i))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut p = vec![0.0; classes];
    for &(_, i) in &order[..k] {
        p[labels[i]] += 1.0 / k as f64;
    }
    p
}

/// Central finite differences of the mean cross-entropy.
pub fn numeric_gradient(weights: &MlpWeights, x: &Matrix, labels: &[usize], h: f64) -> Vec<f64> {
    let base = weights.parameters();
    let mut probe = weights.clone();
    (0..base.len())
        .map(|p| {
            let mut theta = base.clone();
            theta[p] = base[p] + h;
            probe.set_parameters(&theta);
            let up = probe.loss(x, labels);
            theta[p] = base[p] - h;
            probe.set_parameters(&theta);
            let down = probe.loss(x, labels);
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Euclidean-norm relative error between two gradient vectors.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(a).max(norm(b)).max(f64::MIN_POSITIVE)
}
