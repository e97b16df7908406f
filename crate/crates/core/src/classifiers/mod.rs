//! Five multiclass classifiers behind one fit / predict-probabilities contract.
//!
//! Every model emits a [`ProbabilityVector`]; uncertainty is least confidence,
//! `1 - max p`.

mod cart;
mod gnb;
mod knn;
mod mlp;
mod scaling;
mod svm;

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Matrix, Result};

pub use cart::{CartParams, DecisionTree, Node};
pub use gnb::{GaussianNb, GnbParams};
pub use knn::{Knn, KnnParams};
pub use mlp::{Mlp, MlpParams, MlpWeights};
pub use scaling::Standardizer;
pub use svm::{LinearSvm, SvmParams};

/// Learning algorithm tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Gnb,
    Cart,
    Svm,
    Mlp,
    Knn,
}

impl Algorithm {
    /// Canonical order; also the query-by-committee membership.
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Gnb,
        Algorithm::Cart,
        Algorithm::Svm,
        Algorithm::Mlp,
        Algorithm::Knn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Gnb => "gnb",
            Algorithm::Cart => "cart",
            Algorithm::Svm => "svm",
            Algorithm::Mlp => "mlp",
            Algorithm::Knn => "knn",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or(Error::InvalidParameter {
                name: "algorithm",
                reason: "expected one of gnb, cart, svm, mlp, knn",
            })
    }
}

/// Per-algorithm hyperparameters. Missing fields take the defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparameters {
    pub gnb: GnbParams,
    pub cart: CartParams,
    pub svm: SvmParams,
    pub mlp: MlpParams,
    pub knn: KnnParams,
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        fn positive(name: &'static str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: "must be positive and finite",
                })
            }
        }
        fn nonzero(name: &'static str, v: usize) -> Result<()> {
            if v > 0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: "must be positive",
                })
            }
        }
        positive("gnb.variance_floor", self.gnb.variance_floor)?;
        nonzero("cart.max_depth", self.cart.max_depth)?;
        nonzero("cart.min_leaf", self.cart.min_leaf)?;
        positive("svm.lambda", self.svm.lambda)?;
        nonzero("svm.epochs", self.svm.epochs)?;
        positive("svm.step", self.svm.step)?;
        nonzero("mlp.hidden", self.mlp.hidden)?;
        nonzero("mlp.epochs", self.mlp.epochs)?;
        positive("mlp.step", self.mlp.step)?;
        nonzero("mlp.batch_size", self.mlp.batch_size)?;
        nonzero("knn.k", self.knn.k)
    }

    /// Sets the seed of every stochastic learner.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.svm.seed = seed;
        self.mlp.seed = seed;
        self
    }
}

/// Per-class probabilities: entries in `[0, 1]` summing to 1 within `1e-9`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(values: Vec<f64>) -> Result<Self> {
        let sum: f64 = values.iter().sum();
        let in_range = values.iter().all(|p| (0.0..=1.0).contains(p));
        if values.is_empty() || !in_range || (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::InvalidProbabilities);
        }
        Ok(Self(values))
    }

    /// Element-wise mean of equally sized vectors (soft vote).
    pub fn mean(members: &[ProbabilityVector]) -> Result<Self> {
        let first = members.first().ok_or(Error::InvalidProbabilities)?;
        let mut acc = alloc::vec![0.0; first.len()];
        for m in members {
            if m.len() != acc.len() {
                return Err(Error::InvalidProbabilities);
            }
            for (a, p) in acc.iter_mut().zip(&m.0) {
                *a += p;
            }
        }
        let n = members.len() as f64;
        Self::new(acc.into_iter().map(|a| a / n).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Most probable class; ties go to the lower class index.
    pub fn argmax(&self) -> usize {
        crate::math::argmax(&self.0)
    }

    /// Least-confidence uncertainty `1 - max p`, in `[0, 1 - 1/C]`.
    pub fn least_confidence(&self) -> f64 {
        1.0 - self.0[self.argmax()]
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// A fitted classifier of any of the five kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum TrainedModel {
    Gnb(GaussianNb),
    Cart(DecisionTree),
    Svm(LinearSvm),
    Mlp(Mlp),
    Knn(Knn),
}

impl TrainedModel {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            TrainedModel::Gnb(_) => Algorithm::Gnb,
            TrainedModel::Cart(_) => Algorithm::Cart,
            TrainedModel::Svm(_) => Algorithm::Svm,
            TrainedModel::Mlp(_) => Algorithm::Mlp,
            TrainedModel::Knn(_) => Algorithm::Knn,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TrainedModel::Gnb(m) => m.dim(),
            TrainedModel::Cart(m) => m.dim(),
            TrainedModel::Svm(m) => m.dim(),
            TrainedModel::Mlp(m) => m.dim(),
            TrainedModel::Knn(m) => m.dim(),
        }
    }

    pub fn num_classes(&self) -> usize {
        match self {
            TrainedModel::Gnb(m) => m.num_classes(),
            TrainedModel::Cart(m) => m.num_classes(),
            TrainedModel::Svm(m) => m.num_classes(),
            TrainedModel::Mlp(m) => m.num_classes(),
            TrainedModel::Knn(m) => m.num_classes(),
        }
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<ProbabilityVector> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let p = match self {
            TrainedModel::Gnb(m) => m.predict_proba(x),
            TrainedModel::Cart(m) => m.predict_proba(x),
            TrainedModel::Svm(m) => m.predict_proba(x),
            TrainedModel::Mlp(m) => m.predict_proba(x),
            TrainedModel::Knn(m) => m.predict_proba(x),
        };
        ProbabilityVector::new(p)
    }

    /// Row-wise [`TrainedModel::predict_proba`].
    pub fn predict_proba_rows(&self, rows: &Matrix) -> Result<Vec<ProbabilityVector>> {
        rows.iter_rows().map(|x| self.predict_proba(x)).collect()
    }

    /// Least-confidence uncertainty of the prediction at `x`.
    pub fn uncertainty(&self, x: &[f64]) -> Result<f64> {
        Ok(self.predict_proba(x)?.least_confidence())
    }
}

/// Fits `algorithm` on `features` / `labels` with `num_classes` classes.
pub fn fit(
    algorithm: Algorithm,
    features: &Matrix,
    labels: &[usize],
    num_classes: usize,
    hp: &Hyperparameters,
) -> Result<TrainedModel> {
    check_training_set(features, labels, num_classes)?;
    Ok(match algorithm {
        Algorithm::Gnb => {
            TrainedModel::Gnb(GaussianNb::fit(features, labels, num_classes, &hp.gnb))
        }
        Algorithm::Cart => {
            TrainedModel::Cart(DecisionTree::fit(features, labels, num_classes, &hp.cart))
        }
        Algorithm::Svm => TrainedModel::Svm(LinearSvm::fit(features, labels, num_classes, &hp.svm)),
        Algorithm::Mlp => TrainedModel::Mlp(Mlp::fit(features, labels, num_classes, &hp.mlp)),
        Algorithm::Knn => TrainedModel::Knn(Knn::fit(features, labels, num_classes, &hp.knn)?),
    })
}

fn check_training_set(features: &Matrix, labels: &[usize], num_classes: usize) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if features.rows() != labels.len() {
        return Err(Error::LengthMismatch {
            what: "labels",
            expected: features.rows(),
            actual: labels.len(),
        });
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
    match present.iter().position(|p| !p) {
        Some(class) => Err(Error::MissingClass(class)),
        None => Ok(()),
    }
}

/// Class frequencies normalised to probabilities.
pub(crate) fn normalized_counts(counts: &[usize]) -> Vec<f64> {
    let total: usize = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}
