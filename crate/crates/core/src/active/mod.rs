//! Active-learning query loops over a labeled train set and an unlabeled pool.
//!
//! Every loop queries one instance at a time, refits from scratch on the
//! accumulated labeled set and records the test AUC after each refit. Ties in
//! any selection rule go to the lower pool index.

mod committee;
mod pool;
mod stream;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifiers::{Algorithm, ProbabilityVector, TrainedModel};
use crate::data::{Dataset, UnlabeledPool};
use crate::evaluation::{auc_roc_ovr_weighted, ScoreMatrix};
use crate::{Error, Matrix, Result};

pub use committee::{disagreement, run_query_by_committee, Committee};
pub use pool::run_pool_based;
pub use stream::{run_stream_based, StreamGate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Stream-based selective sampling with a percentile uncertainty gate.
    Stream,
    /// Pool-based uncertainty sampling.
    Pool,
    /// Pool-based query-by-committee over all five algorithms.
    Qbc,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Stream, Scenario::Pool, Scenario::Qbc];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Stream => "stream",
            Scenario::Pool => "pool",
            Scenario::Qbc => "qbc",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s))
            .ok_or(Error::InvalidParameter {
                name: "scenario",
                reason: "expected one of stream, pool, qbc",
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Stream gate percentile, in `(0, 100)`.
    pub percentile: f64,
    /// Streamed instances labeled unconditionally before the gate activates.
    pub warmup: usize,
    /// Seeds the stream visiting order.
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            percentile: 75.0,
            warmup: 20,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.percentile > 0.0 && self.percentile < 100.0) {
            return Err(Error::InvalidParameter {
                name: "percentile",
                reason: "must lie strictly between 0 and 100",
            });
        }
        if self.warmup == 0 {
            return Err(Error::InvalidParameter {
                name: "warmup",
                reason: "must be at least 1",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum QueryAction {
    Labeled,
    Discarded,
}

impl QueryAction {
    pub fn name(self) -> &'static str {
        match self {
            QueryAction::Labeled => "LABELED",
            QueryAction::Discarded => "DISCARDED",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryEvent {
    /// 1-based, strictly increasing.
    pub step: usize,
    pub instance_id: String,
    pub action: QueryAction,
    /// Uncertainty (or committee disagreement) when the decision was made.
    pub score: f64,
    /// Test AUC after the refit; `None` when the instance was discarded.
    pub test_auc: Option<f64>,
}

/// Ordered record of one scenario run on one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub scenario: Scenario,
    /// `None` for query-by-committee, which evaluates the committee soft vote.
    pub algorithm: Option<Algorithm>,
    pub config: ScenarioConfig,
    pub events: Vec<QueryEvent>,
    /// Test AUC before any query.
    pub initial_auc: f64,
    /// Test AUC after the last refit.
    pub final_auc: f64,
}

impl LearningCurve {
    pub fn labeled_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| e.action == QueryAction::Labeled)
            .count()
    }

    /// Test AUC after each labeling, in order.
    pub fn auc_trajectory(&self) -> Vec<f64> {
        self.events.iter().filter_map(|e| e.test_auc).collect()
    }
}

/// Growing labeled set: the initial train rows followed by queried rows.
#[derive(Debug, Clone)]
pub(crate) struct LabeledSet {
    pub features: Matrix,
    pub labels: Vec<usize>,
    pub num_classes: usize,
}

impl LabeledSet {
    fn from_dataset(train: &Dataset) -> Self {
        Self {
            features: train.features().clone(),
            labels: train.labels().to_vec(),
            num_classes: train.num_classes(),
        }
    }

    fn push(&mut self, row: &[f64], label: usize) {
        self.features.push_row(row);
        self.labels.push(label);
    }
}

fn check_inputs(
    train: &Dataset,
    pool: &UnlabeledPool,
    test: &Dataset,
    config: &ScenarioConfig,
) -> Result<()> {
    config.validate()?;
    if pool.is_empty() {
        return Err(Error::InvalidParameter {
            name: "pool",
            reason: "must contain at least one instance",
        });
    }
    for dim in [pool.features().cols(), test.dim()] {
        if dim != train.dim() {
            return Err(Error::DimensionMismatch {
                expected: train.dim(),
                actual: dim,
            });
        }
    }
    if test.num_classes() != train.num_classes() {
        return Err(Error::InvalidParameter {
            name: "test",
            reason: "class count differs from the train set",
        });
    }
    Ok(())
}

fn score_auc(probas: &[ProbabilityVector], test: &Dataset) -> Result<f64> {
    auc_roc_ovr_weighted(&ScoreMatrix::from_probabilities(
        probas,
        test.labels().to_vec(),
    )?)
}

pub(crate) fn model_auc(model: &TrainedModel, test: &Dataset) -> Result<f64> {
    score_auc(&model.predict_proba_rows(test.features())?, test)
}

/// Position (in `remaining`) of the highest score; ties keep the earliest,
/// which is the lowest pool index because `remaining` stays ascending.
fn argmax_position(scores: &[f64]) -> usize {
    crate::math::argmax(scores)
}
