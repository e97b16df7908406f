use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::{Error, Result};

/// Simulated annotator backed by held-out ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelOracle {
    labels: BTreeMap<String, usize>,
    calls: usize,
}

impl LabelOracle {
    pub fn new(labels: impl IntoIterator<Item = (String, usize)>) -> Self {
        Self {
            labels: labels.into_iter().collect(),
            calls: 0,
        }
    }

    /// Answers with the true label and counts the call. Unknown ids are a
    /// configuration error, not a recoverable miss.
    pub fn query(&mut self, id: &str) -> Result<usize> {
        let label = *self
            .labels
            .get(id)
            .ok_or_else(|| Error::OracleMiss(id.into()))?;
        self.calls += 1;
        Ok(label)
    }

    pub fn covers(&self, id: &str) -> bool {
        self.labels.contains_key(id)
    }

    /// Number of answered queries so far.
    pub fn calls(&self) -> usize {
        self.calls
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}
