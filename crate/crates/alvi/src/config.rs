//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use alvi_core::active::{Scenario, ScenarioConfig};
use alvi_core::classifiers::{Algorithm, Hyperparameters};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub input: InputSpec,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "all_scenarios")]
    pub scenarios: Vec<Scenario>,
    #[serde(default = "all_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub hyperparameters: Hyperparameters,
    #[serde(default = "default_percentile")]
    pub stream_percentile: f64,
    #[serde(default = "default_warmup")]
    pub warmup: usize,
    /// Not echoed into reports, so runs written to different directories
    /// still produce identical files.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSpec {
    Csv { path: PathBuf },
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_per_class: Vec<usize>,
    pub dim: usize,
    pub separation: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_k() -> usize {
    10
}

fn all_scenarios() -> Vec<Scenario> {
    Scenario::ALL.to_vec()
}

fn all_algorithms() -> Vec<Algorithm> {
    Algorithm::ALL.to_vec()
}

fn default_percentile() -> f64 {
    75.0
}

fn default_warmup() -> usize {
    20
}

impl ExperimentConfig {
    /// All scenarios and algorithms with default settings.
    pub fn new(input: InputSpec) -> Self {
        Self {
            input,
            k: default_k(),
            seed: 0,
            scenarios: all_scenarios(),
            algorithms: all_algorithms(),
            hyperparameters: Hyperparameters::default(),
            stream_percentile: default_percentile(),
            warmup: default_warmup(),
            output_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.k < 3 {
            return fail(format!("k must be at least 3, got {}", self.k));
        }
        if self.scenarios.is_empty() {
            return fail("at least one scenario is required".into());
        }
        if self.algorithms.is_empty() {
            return fail("at least one algorithm is required".into());
        }
        if let InputSpec::Synthetic(s) = &self.input {
            if s.n_per_class.len() < 2 || s.n_per_class.contains(&0) || s.dim == 0 {
                return fail(
                    "synthetic input needs at least two non-empty classes and dim >= 1".into(),
                );
            }
            if !(s.separation.is_finite() && s.separation >= 0.0) {
                return fail("synthetic separation must be finite and non-negative".into());
            }
        }
        self.hyperparameters
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        self.scenario_config(0)
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn fold_seed(&self, fold: usize) -> u64 {
        self.seed.wrapping_add(fold as u64)
    }

    pub fn scenario_config(&self, fold: usize) -> ScenarioConfig {
        ScenarioConfig {
            percentile: self.stream_percentile,
            warmup: self.warmup,
            seed: self.fold_seed(fold),
        }
    }

    pub fn wants_scenario(&self, scenario: Scenario) -> bool {
        self.scenarios.contains(&scenario)
    }

    pub fn wants_algorithm(&self, algorithm: Algorithm) -> bool {
        self.algorithms.contains(&algorithm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_json(r#"{"input": {"csv": {"path": "x.csv"}}}"#).unwrap();
        assert_eq!(c.k, 10);
        assert_eq!(c.scenarios.len(), 3);
        assert_eq!(c.algorithms.len(), 5);
        assert_eq!(c.stream_percentile, 75.0);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        let bad = [
            r#"{"input": {"csv": {"path": "x"}}, "folds": 3}"#,
            r#"{"input": {"csv": {"path": "x", "sep": ";"}}}"#,
            r#"{"input": {"csv": {"path": "x"}}, "hyperparameters": {"mlp": {"depth": 2}}}"#,
            r#"{"input": {"csv": {"path": "x"}}, "k": 2}"#,
            r#"{"input": {"csv": {"path": "x"}}, "scenarios": []}"#,
            r#"{"input": {"csv": {"path": "x"}}, "algorithms": ["rf"]}"#,
            r#"{"input": {"csv": {"path": "x"}}, "stream_percentile": 100}"#,
            r#"{"input": {"synthetic": {"n_per_class": [5], "dim": 2, "separation": 1}}}"#,
        ];
        for text in bad {
            assert!(
                matches!(
                    ExperimentConfig::from_json(text),
                    Err(HarnessError::Config(_))
                ),
                "{text}"
            );
        }
    }
}
