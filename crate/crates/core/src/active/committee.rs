use alloc::vec::Vec;

use super::{
    argmax_position, check_inputs, score_auc, LabeledSet, LearningCurve, QueryAction, QueryEvent,
    Scenario, ScenarioConfig,
};
use crate::classifiers::{fit, Algorithm, Hyperparameters, ProbabilityVector, TrainedModel};
use crate::data::{Dataset, LabelOracle, UnlabeledPool};
use crate::math::entropy_of_counts;
use crate::Result;

/// Vote entropy (nats) of the members' predicted classes. A member whose
/// probabilities tie votes for the lowest tied class.
pub fn disagreement(committee: &[ProbabilityVector]) -> f64 {
    let classes = committee.iter().map(|p| p.len()).max().unwrap_or(0);
    let mut votes = alloc::vec![0usize; classes];
    for p in committee {
        votes[p.argmax()] += 1;
    }
    entropy_of_counts(&votes)
}

/// One fitted model per algorithm in [`Algorithm::ALL`].
#[derive(Debug, Clone)]
pub struct Committee {
    members: Vec<TrainedModel>,
}

impl Committee {
    pub fn fit(
        features: &crate::Matrix,
        labels: &[usize],
        num_classes: usize,
        hp: &Hyperparameters,
    ) -> Result<Self> {
        let members = Algorithm::ALL
            .iter()
            .map(|&a| fit(a, features, labels, num_classes, hp))
            .collect::<Result<_>>()?;
        Ok(Self { members })
    }

    pub fn members(&self) -> &[TrainedModel] {
        &self.members
    }

    pub fn member_probas(&self, x: &[f64]) -> Result<Vec<ProbabilityVector>> {
        self.members.iter().map(|m| m.predict_proba(x)).collect()
    }

    /// Soft vote: mean of the member probability vectors.
    pub fn predict_proba(&self, x: &[f64]) -> Result<ProbabilityVector> {
        ProbabilityVector::mean(&self.member_probas(x)?)
    }

    fn auc(&self, test: &Dataset) -> Result<f64> {
        let probas = test
            .features()
            .iter_rows()
            .map(|x| self.predict_proba(x))
            .collect::<Result<Vec<_>>>()?;
        score_auc(&probas, test)
    }
}

/// Query-by-committee: refit all five algorithms each step and query the
/// pool instance with the highest vote entropy. The test AUC is that of the
/// committee soft vote.
pub fn run_query_by_committee(
    train: &Dataset,
    pool: &UnlabeledPool,
    oracle: &mut LabelOracle,
    test: &Dataset,
    hp: &Hyperparameters,
    config: &ScenarioConfig,
) -> Result<LearningCurve> {
    check_inputs(train, pool, test, config)?;
    let mut labeled = LabeledSet::from_dataset(train);
    let mut committee =
        Committee::fit(&labeled.features, &labeled.labels, labeled.num_classes, hp)?;
    let initial_auc = committee.auc(test)?;
    let mut final_auc = initial_auc;

    let mut remaining: Vec<usize> = (0..pool.len()).collect();
    let mut events = Vec::with_capacity(pool.len());
    let mut scores = Vec::with_capacity(pool.len());
    while !remaining.is_empty() {
        scores.clear();
        for &i in &remaining {
            scores.push(disagreement(
                &committee.member_probas(pool.features().row(i))?,
            ));
        }
        let pos = argmax_position(&scores);
        let chosen = remaining.remove(pos);
        let id = &pool.ids()[chosen];
        let label = oracle.query(id)?;
        labeled.push(pool.features().row(chosen), label);
        committee = Committee::fit(&labeled.features, &labeled.labels, labeled.num_classes, hp)?;
        final_auc = committee.auc(test)?;
        events.push(QueryEvent {
            step: events.len() + 1,
            instance_id: id.clone(),
            action: QueryAction::Labeled,
            score: scores[pos],
            test_auc: Some(final_auc),
        });
    }

    Ok(LearningCurve {
        scenario: Scenario::Qbc,
        algorithm: None,
        config: config.clone(),
        events,
        initial_auc,
        final_auc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn votes(classes: &[usize]) -> Vec<ProbabilityVector> {
        classes
            .iter()
            .map(|&c| {
                let mut p = vec![0.0; 3];
                p[c] = 1.0;
                ProbabilityVector::new(p).unwrap()
            })
            .collect()
    }

    #[test]
    fn unanimous_committee_agrees() {
        assert_eq!(disagreement(&votes(&[0, 0, 0, 0, 0])), 0.0);
    }

    #[test]
    fn vote_entropy_examples() {
        let split = -(2.0 * 0.4 * 0.4f64.ln() + 0.2 * 0.2f64.ln());
        assert!((disagreement(&votes(&[0, 1, 0, 1, 2])) - split).abs() < 1e-12);
        assert!((split - 1.0549).abs() < 1e-4);
        let lopsided = -(0.8 * 0.8f64.ln() + 0.2 * 0.2f64.ln());
        assert!((disagreement(&votes(&[0, 0, 1, 0, 0])) - lopsided).abs() < 1e-12);
        assert!((lopsided - 0.5004).abs() < 1e-4);
    }

    #[test]
    fn tied_member_votes_for_lower_class() {
        let tied = ProbabilityVector::new(vec![0.4, 0.4, 0.2]).unwrap();
        let mut members = votes(&[0, 0, 0, 0]);
        members.push(tied);
        assert_eq!(disagreement(&members), 0.0);
    }
}
