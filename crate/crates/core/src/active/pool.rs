use alloc::vec::Vec;

use super::{
    argmax_position, check_inputs, model_auc, LabeledSet, LearningCurve, QueryAction, QueryEvent,
    Scenario, ScenarioConfig,
};
use crate::classifiers::{fit, Algorithm, Hyperparameters};
use crate::data::{Dataset, LabelOracle, UnlabeledPool};
use crate::Result;

/// Pool-based uncertainty sampling: repeatedly query the pool instance the
/// current model is least confident about, until the pool is empty.
pub fn run_pool_based(
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

    let mut remaining: Vec<usize> = (0..pool.len()).collect();
    let mut events = Vec::with_capacity(pool.len());
    let mut scores = Vec::with_capacity(pool.len());
    while !remaining.is_empty() {
        scores.clear();
        for &i in &remaining {
            scores.push(model.uncertainty(pool.features().row(i))?);
        }
        let pos = argmax_position(&scores);
        let chosen = remaining.remove(pos);
        let id = &pool.ids()[chosen];
        let label = oracle.query(id)?;
        labeled.push(pool.features().row(chosen), label);
        model = fit(
            algorithm,
            &labeled.features,
            &labeled.labels,
            labeled.num_classes,
            hp,
        )?;
        final_auc = model_auc(&model, test)?;
        events.push(QueryEvent {
            step: events.len() + 1,
            instance_id: id.clone(),
            action: QueryAction::Labeled,
            score: scores[pos],
            test_auc: Some(final_auc),
        });
    }

    Ok(LearningCurve {
        scenario: Scenario::Pool,
        algorithm: Some(algorithm),
        config: config.clone(),
        events,
        initial_auc,
        final_auc,
    })
}
