use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::{Error, Result};

/// Instance-to-fold map produced by [`stratified_kfold`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    k: usize,
    fold_of: Vec<usize>,
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_of(&self, instance: usize) -> usize {
        self.fold_of[instance]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.fold_of
    }

    /// Instance indices in `fold`, ascending.
    pub fn members(&self, fold: usize) -> Vec<usize> {
        self.fold_of
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| (f == fold).then_some(i))
            .collect()
    }

    /// `counts[fold][class]`
    pub fn class_counts(&self, labels: &[usize], num_classes: usize) -> Vec<Vec<usize>> {
        let mut counts = alloc::vec![alloc::vec![0; num_classes]; self.k];
        for (&fold, &label) in self.fold_of.iter().zip(labels) {
            counts[fold][label] += 1;
        }
        counts
    }
}

/// Shuffles each class with a seeded generator, then deals its members to
/// folds round-robin. The dealing position carries over from one class to the
/// next so that fold sizes stay balanced as well.
pub fn stratified_kfold(dataset: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k == 0 {
        return Err(Error::InvalidFoldCount(k));
    }
    let counts = dataset.class_counts();
    if let Some((class, &count)) = counts.iter().enumerate().find(|(_, &c)| c < k) {
        return Err(Error::InfeasibleStratification { class, count, k });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = alloc::vec![0; dataset.len()];
    let mut offset = 0;
    for class in 0..dataset.num_classes() {
        let mut members: Vec<usize> = dataset
            .labels()
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| (l == class).then_some(i))
            .collect();
        members.shuffle(&mut rng);
        for (pos, &i) in members.iter().enumerate() {
            fold_of[i] = (offset + pos) % k;
        }
        offset = (offset + members.len()) % k;
    }
    Ok(FoldAssignment { k, fold_of })
}

/// Which fold tests, which fold is the unlabeled pool, and which folds train.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRoles {
    pub test_fold: usize,
    pub pool_fold: usize,
    pub train_folds: Vec<usize>,
}

/// Instance indices for each role of one split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub pool: Vec<usize>,
    pub test: Vec<usize>,
}

/// The pool is always the fold after the test fold, wrapping around.
pub fn split_roles(assignment: &FoldAssignment, test_fold: usize) -> Result<SplitRoles> {
    let k = assignment.k();
    if k < 2 {
        return Err(Error::InvalidFoldCount(k));
    }
    if test_fold >= k {
        return Err(Error::FoldOutOfRange { fold: test_fold, k });
    }
    let pool_fold = (test_fold + 1) % k;
    let train_folds = (0..k)
        .filter(|&f| f != test_fold && f != pool_fold)
        .collect();
    Ok(SplitRoles {
        test_fold,
        pool_fold,
        train_folds,
    })
}

impl SplitRoles {
    pub fn indices(&self, assignment: &FoldAssignment) -> SplitIndices {
        let mut split = SplitIndices {
            train: Vec::new(),
            pool: Vec::new(),
            test: Vec::new(),
        };
        for (i, &fold) in assignment.as_slice().iter().enumerate() {
            if fold == self.test_fold {
                split.test.push(i);
            } else if fold == self.pool_fold {
                split.pool.push(i);
            } else {
                split.train.push(i);
            }
        }
        split
    }
}
