//! Fold-parallel experiment orchestration and report assembly.

use std::fmt;

use alvi_core::active::{
    run_pool_based, run_query_by_committee, run_stream_based, LearningCurve, Scenario,
};
use alvi_core::classifiers::Algorithm;
use alvi_core::data::{generate_synthetic, split_roles, stratified_kfold, Dataset, FoldAssignment};
use alvi_core::evaluation::{quartile_improvement_test, wilcoxon_signed_rank, WilcoxonMethod};
use alvi_core::selection::select_top_k;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{load_feature_csv, ExperimentConfig, HarnessError, InputSpec};

/// One row of the AUC table: a scenario with its learner, or the committee.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RunKey {
    pub scenario: Scenario,
    pub algorithm: Option<Algorithm>,
}

impl RunKey {
    pub fn algorithm_label(&self) -> &'static str {
        self.algorithm.map_or("committee", Algorithm::name)
    }
}

impl fmt::Display for RunKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.scenario, self.algorithm_label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n: usize,
    pub dim: usize,
    pub num_classes: usize,
    pub class_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub fold: usize,
    pub pool_fold: usize,
    pub seed: u64,
    pub train_size: usize,
    pub pool_size: usize,
    pub test_size: usize,
    pub selected_features: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AucCell {
    pub key: RunKey,
    pub fold: usize,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValueCell {
    pub algorithm: Algorithm,
    pub first: Scenario,
    pub second: Scenario,
    pub statistic: f64,
    pub p_value: f64,
    pub method: WilcoxonMethod,
}

impl PValueCell {
    pub fn comparison(&self) -> String {
        format!("{}_vs_{}", self.first, self.second)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub key: RunKey,
    pub step: usize,
    pub auc_mean: f64,
    pub auc_var: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuartileCell {
    pub key: RunKey,
    pub fold: usize,
    /// `None` when the curve has too few labelings to form quartiles.
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldCurve {
    pub fold: usize,
    pub curve: LearningCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub dataset: DatasetSummary,
    pub folds: Vec<FoldSummary>,
    pub table1: Vec<AucCell>,
    pub table2: Vec<PValueCell>,
    pub fig1: Vec<CurvePoint>,
    pub quartile_tests: Vec<QuartileCell>,
    pub curves: Vec<FoldCurve>,
}

impl ExperimentReport {
    /// Fold AUCs of one table row, in fold order.
    pub fn fold_aucs(&self, key: RunKey) -> Vec<f64> {
        self.table1
            .iter()
            .filter(|c| c.key == key)
            .map(|c| c.auc)
            .collect()
    }

    /// Distinct table rows in display order.
    pub fn run_keys(&self) -> Vec<RunKey> {
        let mut keys: Vec<RunKey> = Vec::new();
        for cell in &self.table1 {
            if !keys.contains(&cell.key) {
                keys.push(cell.key);
            }
        }
        keys
    }
}

/// Table rows requested by `config`: stream and pool rows per algorithm,
/// then the committee row.
pub fn run_keys(config: &ExperimentConfig) -> Vec<RunKey> {
    let mut keys = Vec::new();
    for scenario in Scenario::ALL
        .into_iter()
        .filter(|&s| config.wants_scenario(s))
    {
        if scenario == Scenario::Qbc {
            keys.push(RunKey {
                scenario,
                algorithm: None,
            });
        } else {
            for algorithm in Algorithm::ALL
                .into_iter()
                .filter(|&a| config.wants_algorithm(a))
            {
                keys.push(RunKey {
                    scenario,
                    algorithm: Some(algorithm),
                });
            }
        }
    }
    keys
}

pub fn load_input(config: &ExperimentConfig) -> Result<Dataset, HarnessError> {
    match &config.input {
        InputSpec::Csv { path } => load_feature_csv(path).map_err(|source| HarnessError::Data {
            path: path.clone(),
            source,
        }),
        InputSpec::Synthetic(s) => generate_synthetic(&s.n_per_class, s.dim, s.separation, s.seed)
            .map_err(|e| HarnessError::Config(e.to_string())),
    }
}

/// Loads the configured input and runs every fold with at most `jobs`
/// concurrent fold runs.
pub fn run_experiment(
    config: &ExperimentConfig,
    jobs: usize,
) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let dataset = load_input(config)?;
    run_experiment_on(&dataset, config, jobs)
}

pub fn run_experiment_on(
    dataset: &Dataset,
    config: &ExperimentConfig,
    jobs: usize,
) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let assignment =
        stratified_kfold(dataset, config.k, config.seed).map_err(HarnessError::Dataset)?;
    let keys = run_keys(config);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start worker threads: {e}")))?;
    let outcomes: Vec<Result<FoldOutcome, HarnessError>> = pool.install(|| {
        (0..config.k)
            .into_par_iter()
            .map(|fold| run_fold(dataset, &assignment, fold, config, &keys))
            .collect()
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    assemble(dataset, config, &keys, outcomes)
}

struct FoldOutcome {
    summary: FoldSummary,
    curves: Vec<(RunKey, LearningCurve)>,
}

fn run_fold(
    dataset: &Dataset,
    assignment: &FoldAssignment,
    fold: usize,
    config: &ExperimentConfig,
    keys: &[RunKey],
) -> Result<FoldOutcome, HarnessError> {
    let at_fold = |key: Option<RunKey>| {
        move |source| HarnessError::Run {
            fold,
            scenario: key.map(|k| k.scenario),
            algorithm: key.and_then(|k| k.algorithm),
            source,
        }
    };
    let roles = split_roles(assignment, fold).map_err(at_fold(None))?;
    let idx = roles.indices(assignment);
    let train = dataset.subset(&idx.train).map_err(at_fold(None))?;
    let ranking = select_top_k(&train);
    let train = ranking.project(&train).map_err(at_fold(None))?;
    let pool = ranking
        .project(&dataset.subset(&idx.pool).map_err(at_fold(None))?)
        .map_err(at_fold(None))?;
    let test = ranking
        .project(&dataset.subset(&idx.test).map_err(at_fold(None))?)
        .map_err(at_fold(None))?;

    let seed = config.fold_seed(fold);
    let hp = config.hyperparameters.clone().with_seed(seed);
    let scenario_config = config.scenario_config(fold);

    let mut curves = Vec::with_capacity(keys.len());
    for &key in keys {
        let (unlabeled, mut oracle) = pool.clone().into_unlabeled();
        let curve = match (key.scenario, key.algorithm) {
            (Scenario::Stream, Some(a)) => run_stream_based(
                a,
                &train,
                &unlabeled,
                &mut oracle,
                &test,
                &hp,
                &scenario_config,
            ),
            (Scenario::Pool, Some(a)) => run_pool_based(
                a,
                &train,
                &unlabeled,
                &mut oracle,
                &test,
                &hp,
                &scenario_config,
            ),
            _ => run_query_by_committee(
                &train,
                &unlabeled,
                &mut oracle,
                &test,
                &hp,
                &scenario_config,
            ),
        }
        .map_err(at_fold(Some(key)))?;
        log::debug!("fold {fold} {key}: final AUC {}", curve.final_auc);
        curves.push((key, curve));
    }
    log::info!("fold {fold} done");
    Ok(FoldOutcome {
        summary: FoldSummary {
            fold,
            pool_fold: roles.pool_fold,
            seed,
            train_size: train.len(),
            pool_size: pool.len(),
            test_size: test.len(),
            selected_features: ranking.selected().to_vec(),
        },
        curves,
    })
}

fn assemble(
    dataset: &Dataset,
    config: &ExperimentConfig,
    keys: &[RunKey],
    outcomes: Vec<FoldOutcome>,
) -> Result<ExperimentReport, HarnessError> {
    let mut table1 = Vec::new();
    let mut quartile_tests = Vec::new();
    let mut fig1 = Vec::new();
    for (r, &key) in keys.iter().enumerate() {
        let mut trajectories = Vec::with_capacity(outcomes.len());
        for outcome in &outcomes {
            let fold = outcome.summary.fold;
            let curve = &outcome.curves[r].1;
            table1.push(AucCell {
                key,
                fold,
                auc: curve.final_auc,
            });
            let p_value = match quartile_improvement_test(curve) {
                Ok(result) => Some(result.p_value),
                Err(alvi_core::Error::CurveTooShort { .. }) => None,
                Err(source) => {
                    return Err(HarnessError::Run {
                        fold,
                        scenario: Some(key.scenario),
                        algorithm: key.algorithm,
                        source,
                    })
                }
            };
            quartile_tests.push(QuartileCell { key, fold, p_value });
            let mut trajectory = vec![curve.initial_auc];
            trajectory.extend(curve.auc_trajectory());
            trajectories.push(trajectory);
        }
        fig1.extend(curve_points(key, &trajectories));
    }

    let mut table2 = Vec::new();
    let scenarios: Vec<Scenario> = Scenario::ALL
        .into_iter()
        .filter(|&s| config.wants_scenario(s))
        .collect();
    for algorithm in Algorithm::ALL
        .into_iter()
        .filter(|&a| config.wants_algorithm(a))
    {
        let key_for = |scenario| RunKey {
            scenario,
            algorithm: (scenario != Scenario::Qbc).then_some(algorithm),
        };
        for (i, &first) in scenarios.iter().enumerate() {
            for &second in &scenarios[i + 1..] {
                let a: Vec<f64> = fold_aucs(&table1, key_for(first));
                let b: Vec<f64> = fold_aucs(&table1, key_for(second));
                let result = wilcoxon_signed_rank(&a, &b).map_err(HarnessError::Dataset)?;
                table2.push(PValueCell {
                    algorithm,
                    first,
                    second,
                    statistic: result.statistic,
                    p_value: result.p_value,
                    method: result.method,
                });
            }
        }
    }

    let mut folds = Vec::with_capacity(outcomes.len());
    let mut curves = Vec::new();
    for outcome in outcomes {
        let fold = outcome.summary.fold;
        folds.push(outcome.summary);
        curves.extend(
            outcome
                .curves
                .into_iter()
                .map(|(_, curve)| FoldCurve { fold, curve }),
        );
    }
    Ok(ExperimentReport {
        config: config.clone(),
        dataset: DatasetSummary {
            n: dataset.len(),
            dim: dataset.dim(),
            num_classes: dataset.num_classes(),
            class_counts: dataset.class_counts(),
        },
        folds,
        table1,
        table2,
        fig1,
        quartile_tests,
        curves,
    })
}

fn fold_aucs(table1: &[AucCell], key: RunKey) -> Vec<f64> {
    table1
        .iter()
        .filter(|c| c.key == key)
        .map(|c| c.auc)
        .collect()
}

/// Mean and population variance across folds at each step. Shorter
/// trajectories hold their last value.
fn curve_points(key: RunKey, trajectories: &[Vec<f64>]) -> Vec<CurvePoint> {
    let steps = trajectories.iter().map(Vec::len).max().unwrap_or(0);
    let n = trajectories.len() as f64;
    (0..steps)
        .map(|step| {
            let values: Vec<f64> = trajectories
                .iter()
                .map(|t| t[step.min(t.len() - 1)])
                .collect();
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            CurvePoint {
                key,
                step,
                auc_mean: mean,
                auc_var: var,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padding_carries_last_value() {
        let key = RunKey {
            scenario: Scenario::Stream,
            algorithm: Some(Algorithm::Gnb),
        };
        let points = curve_points(key, &[vec![0.5, 0.7], vec![0.5, 0.6, 0.9]]);
        assert_eq!(points.len(), 3);
        assert_eq!(points[0].auc_var, 0.0);
        assert!((points[2].auc_mean - 0.8).abs() < 1e-15);
        assert!((points[2].auc_var - 0.01).abs() < 1e-15);
    }

    #[test]
    fn single_fold_has_zero_variance() {
        let key = RunKey {
            scenario: Scenario::Qbc,
            algorithm: None,
        };
        let points = curve_points(key, &[vec![0.5, 0.6, 0.65]]);
        assert!(points.iter().all(|p| p.auc_var == 0.0));
    }

    #[test]
    fn row_layout() {
        let config = ExperimentConfig::new(InputSpec::Csv { path: "x".into() });
        let keys = run_keys(&config);
        assert_eq!(keys.len(), 11);
        assert_eq!(keys[10].to_string(), "qbc_committee");
        assert_eq!(keys[0].to_string(), "stream_gnb");
    }
}
