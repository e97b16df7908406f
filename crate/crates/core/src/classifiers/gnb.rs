use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math::softmax_in_place;
use crate::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GnbParams {
    /// Added to every class variance, relative to the largest feature variance
    /// of the training set.
    pub variance_floor: f64,
}

impl Default for GnbParams {
    fn default() -> Self {
        Self {
            variance_floor: 1e-9,
        }
    }
}

/// Gaussian naive Bayes with per-class, per-feature means and variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    means: Matrix,
    variances: Matrix,
    log_priors: Vec<f64>,
}

impl GaussianNb {
    pub(super) fn fit(
        features: &Matrix,
        labels: &[usize],
        num_classes: usize,
        params: &GnbParams,
    ) -> Self {
        let d = features.cols();
        let mut counts = alloc::vec![0usize; num_classes];
        let mut means = Matrix::zeros(num_classes, d);
        for (row, &c) in features.iter_rows().zip(labels) {
            counts[c] += 1;
            for (m, v) in means.row_mut(c).iter_mut().zip(row) {
                *m += v;
            }
        }
        for (c, &n) in counts.iter().enumerate() {
            means.row_mut(c).iter_mut().for_each(|m| *m /= n as f64);
        }
        let mut variances = Matrix::zeros(num_classes, d);
        for (row, &c) in features.iter_rows().zip(labels) {
            let mu = means.row(c).to_vec();
            for ((s, v), m) in variances.row_mut(c).iter_mut().zip(row).zip(&mu) {
                *s += (v - m) * (v - m);
            }
        }

        let max_var = Self::max_feature_variance(features);
        let floor = if max_var > 0.0 {
            params.variance_floor * max_var
        } else {
            params.variance_floor
        };
        for (c, &n) in counts.iter().enumerate() {
            variances
                .row_mut(c)
                .iter_mut()
                .for_each(|s| *s = *s / n as f64 + floor);
        }
        let total = labels.len() as f64;
        let log_priors = counts
            .iter()
            .map(|&n| libm::log(n as f64 / total))
            .collect();
        Self {
            means,
            variances,
            log_priors,
        }
    }

    fn max_feature_variance(features: &Matrix) -> f64 {
        let n = features.rows() as f64;
        (0..features.cols())
            .map(|j| {
                let col = features.column(j);
                let mean = col.iter().sum::<f64>() / n;
                col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
            })
            .fold(0.0, f64::max)
    }

    pub fn dim(&self) -> usize {
        self.means.cols()
    }

    pub fn num_classes(&self) -> usize {
        self.log_priors.len()
    }

    pub fn means(&self) -> &Matrix {
        &self.means
    }

    pub fn variances(&self) -> &Matrix {
        &self.variances
    }

    /// Joint log-likelihood per class, `log p(c) + sum_j log N(x_j; mu, var)`.
    pub fn joint_log_likelihood(&self, x: &[f64]) -> Vec<f64> {
        (0..self.num_classes())
            .map(|c| {
                let ll: f64 = x
                    .iter()
                    .zip(self.means.row(c))
                    .zip(self.variances.row(c))
                    .map(|((v, m), s)| {
                        -0.5 * (libm::log(2.0 * core::f64::consts::PI * s) + (v - m) * (v - m) / s)
                    })
                    .sum();
                self.log_priors[c] + ll
            })
            .collect()
    }

    pub(super) fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let mut jll = self.joint_log_likelihood(x);
        softmax_in_place(&mut jll);
        jll
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit_1d(xs: &[f64], labels: &[usize], c: usize) -> GaussianNb {
        let m = Matrix::from_vec(xs.len(), 1, xs.to_vec()).unwrap();
        GaussianNb::fit(&m, labels, c, &GnbParams::default())
    }

    #[test]
    fn mirror_symmetric_classes_split_evenly_at_origin() {
        let nb = fit_1d(&[-1.0, -1.0, -3.0, 1.0, 1.0, 3.0], &[0, 0, 0, 1, 1, 1], 2);
        let p = nb.predict_proba(&[0.0]);
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn matches_hand_computed_posterior() {
        // class 0: {0, 2} -> mean 1, var 1; class 1: {3, 5, 7} -> mean 5, var 8/3
        // priors 2/5, 3/5. Evaluate at x = 2.
        let nb = fit_1d(&[0.0, 2.0, 3.0, 5.0, 7.0], &[0, 0, 1, 1, 1], 2);
        let floor = 1e-9 * 5.84; // population variance of all five values
        let gauss = |x: f64, m: f64, v: f64| {
            (-(x - m) * (x - m) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt()
        };
        let a = 0.4 * gauss(2.0, 1.0, 1.0 + floor);
        let b = 0.6 * gauss(2.0, 5.0, 8.0 / 3.0 + floor);
        let p = nb.predict_proba(&[2.0]);
        assert!((p[0] - a / (a + b)).abs() < 1e-9, "{p:?}");
        assert!((p[1] - b / (a + b)).abs() < 1e-9);
    }

    #[test]
    fn constant_features_stay_finite() {
        let nb = fit_1d(&[1.0, 1.0, 1.0, 1.0], &[0, 0, 1, 1], 2);
        let p = nb.predict_proba(&[1.0]);
        assert!(p.iter().all(|v| v.is_finite()));
        assert!((p[0] - 0.5).abs() < 1e-12);
    }
}
