use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    check_inputs, model_auc, LabeledSet, LearningCurve, QueryAction, QueryEvent, Scenario,
    ScenarioConfig,
};
use crate::classifiers::{fit, Algorithm, Hyperparameters};
use crate::data::{Dataset, LabelOracle, UnlabeledPool};
use crate::math::percentile_sorted;
use crate::Result;

/// Label-or-discard rule for streamed uncertainty scores.
///
/// The first `warmup` offers are always accepted. Afterwards an offer is
/// accepted iff its score is at least the percentile (linear interpolation)
/// of all scores offered before it. Every offer joins the history.
#[derive(Debug, Clone)]
pub struct StreamGate {
    percentile: f64,
    warmup: usize,
    sorted_history: Vec<f64>,
}

impl StreamGate {
    pub fn new(percentile: f64, warmup: usize) -> Self {
        Self {
            percentile,
            warmup,
            sorted_history: Vec::new(),
        }
    }

    /// Current threshold, or `None` while warming up.
    pub fn threshold(&self) -> Option<f64> {
        (self.sorted_history.len() >= self.warmup && !self.sorted_history.is_empty())
            .then(|| percentile_sorted(&self.sorted_history, self.percentile))
    }

    pub fn offer(&mut self, score: f64) -> bool {
        let accept = self.threshold().is_none_or(|t| score >= t);
        let at = self
            .sorted_history
            .partition_point(|&v| v.total_cmp(&score).is_le());
        self.sorted_history.insert(at, score);
        accept
    }
}

/// Stream-based selective sampling: visit the pool once in a seeded random
/// order, labeling an instance only when the gate accepts its uncertainty.
pub fn run_stream_based(
    algorithm: Algorithm,
    train: &Dataset,
    pool: &UnlabeledPool,
    oracle: &mut LabelOracle,
    test: &Dataset,
    hp: &Hyperparameters,
    config: &ScenarioConfig,
) -> Result<LearningCurve> {
    check_inputs(train, pool, test, config)?;
    let mut labeled = LabeledSet::from_dataset(train);
    let mut model = fit(
        algorithm,
        &labeled.features,
        &labeled.labels,
        labeled.num_classes,
        hp,
    )?;
    let initial_auc = model_auc(&model, test)?;
    let mut final_auc = initial_auc;

    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let mut gate = StreamGate::new(config.percentile, config.warmup);
    let mut events = Vec::with_capacity(pool.len());
    for (visit, &i) in order.iter().enumerate() {
        let row = pool.features().row(i);
        let id = &pool.ids()[i];
        let score = model.uncertainty(row)?;
        let (action, test_auc) = if gate.offer(score) {
            let label = oracle.query(id)?;
            labeled.push(row, label);
            model = fit(
                algorithm,
                &labeled.features,
                &labeled.labels,
                labeled.num_classes,
                hp,
            )?;
            final_auc = model_auc(&model, test)?;
            (QueryAction::Labeled, Some(final_auc))
        } else {
            (QueryAction::Discarded, None)
        };
        events.push(QueryEvent {
            step: visit + 1,
            instance_id: id.clone(),
            action,
            score,
            test_auc,
        });
    }

    Ok(LearningCurve {
        scenario: Scenario::Stream,
        algorithm: Some(algorithm),
        config: config.clone(),
        events,
        initial_auc,
        final_auc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_compares_against_prior_history() {
        let mut gate = StreamGate::new(75.0, 10);
        for i in 1..=10 {
            assert!(gate.offer(i as f64 / 10.0), "warmup always labels");
        }
        assert!((gate.threshold().unwrap() - 0.775).abs() < 1e-12);
        let mut probe = gate.clone();
        assert!(probe.offer(0.9));
        assert!(!gate.offer(0.5));
    }

    #[test]
    fn constant_scores_are_always_labeled() {
        let mut gate = StreamGate::new(75.0, 3);
        assert!((0..50).all(|_| gate.offer(0.25)));
    }
}
