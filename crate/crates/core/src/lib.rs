//! Algorithms for benchmarking active-learning query strategies on
//! multiclass feature-vector data.
//!
//! The crate is `no_std` (it only needs `alloc`) and performs no IO. It covers:
//!
//! - [`data`]: datasets, stratified folds with train/pool/test roles, a
//!   simulated label oracle and a synthetic Gaussian-blob generator;
//! - [`selection`]: mutual-information feature ranking with `K = round(sqrt(N))`;
//! - [`classifiers`]: Gaussian naive Bayes, CART, linear SVM, MLP and kNN
//!   behind one probability-emitting contract;
//! - [`active`]: stream-based, pool-based and query-by-committee loops;
//! - [`evaluation`]: weighted one-vs-rest AUC ROC, exact Wilcoxon signed-rank
//!   tests and the first-vs-last-quartile learning-curve test.
//!
//! All randomness is drawn from explicitly seeded ChaCha generators, so every
//! result is reproducible bit for bit on a given machine.
#![cfg_attr(not(test), no_std)]

extern crate alloc;
#[cfg(all(feature = "std", not(test)))]
extern crate std;

pub mod active;
pub mod classifiers;
pub mod data;
mod error;
pub mod evaluation;
mod math;
mod matrix;
pub mod selection;

pub use error::{Error, Result};
pub use matrix::Matrix;
