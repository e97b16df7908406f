use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::Dataset;
use crate::{Error, Matrix, Result};

/// Isotropic unit-variance Gaussian blobs, one per class.
///
/// With `C <= d` the mean of class `c` is `separation / sqrt(2) * e_c`, so every
/// pair of class means lies exactly `separation` apart. With more classes than
/// dimensions the means are placed along the first axis at multiples of
/// `separation`. Ids are `syn000000`, `syn000001`, ... in generation order.
pub fn generate_synthetic(
    n_per_class: &[usize],
    dim: usize,
    separation: f64,
    seed: u64,
) -> Result<Dataset> {
    if n_per_class.is_empty() || n_per_class.contains(&0) {
        return Err(Error::InvalidParameter {
            name: "n_per_class",
            reason: "every class needs a positive count",
        });
    }
    if dim == 0 {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: "must be at least 1",
        });
    }
    if !(separation >= 0.0 && separation.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "separation",
            reason: "must be finite and non-negative",
        });
    }

    let num_classes = n_per_class.len();
    let total: usize = n_per_class.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Matrix::with_cols(dim);
    let mut labels = Vec::with_capacity(total);
    let mut row = alloc::vec![0.0; dim];
    for (class, &count) in n_per_class.iter().enumerate() {
        let (axis, offset) = if num_classes <= dim {
            (class, separation / core::f64::consts::SQRT_2)
        } else {
            (0, class as f64 * separation)
        };
        for _ in 0..count {
            for v in row.iter_mut() {
                *v = StandardNormal.sample(&mut rng);
            }
            row[axis] += offset;
            features.push_row(&row);
            labels.push(class);
        }
    }
    let ids = (0..total).map(|i| format!("syn{i:06}")).collect();
    Dataset::new(ids, features, labels, num_classes)
}
