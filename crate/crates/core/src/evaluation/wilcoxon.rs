use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest effective sample size handled by the exact null distribution.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Sum of the ranks of the positive differences.
    pub statistic: f64,
    /// Number of non-zero differences.
    pub n_effective: usize,
    /// Two-sided p-value in `(0, 1]`.
    pub p_value: f64,
    pub method: WilcoxonMethod,
    /// Every difference was zero; `p_value` is 1.
    pub degenerate: bool,
}

/// Paired two-sided Wilcoxon signed-rank test on `a - b`.
///
/// Zero differences are dropped; tied magnitudes share their mean rank. Up to
/// [`EXACT_MAX_N`] non-zero differences the p-value comes from the exact null
/// distribution over all `2^n` sign assignments (tie-aware), beyond that from
/// the tie-corrected normal approximation without continuity correction.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            what: "second sample",
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "need at least two pairs",
        });
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "differences must be finite",
        });
    }
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            statistic: 0.0,
            n_effective: 0,
            p_value: 1.0,
            method: WilcoxonMethod::Exact,
            degenerate: true,
        });
    }

    let (doubled_ranks, tie_sizes) = doubled_ranks(&diffs);
    let doubled_w: u64 = diffs
        .iter()
        .zip(&doubled_ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let statistic = doubled_w as f64 / 2.0;

    let (p_value, method) = if n <= EXACT_MAX_N {
        let counts = exact_null_counts(&doubled_ranks);
        let w = doubled_w as usize;
        let lower: u64 = counts[..=w].iter().sum();
        let upper: u64 = counts[w..].iter().sum();
        let total = (1u64 << n) as f64;
        let p = 2.0 * lower.min(upper) as f64 / total;
        (p.min(1.0), WilcoxonMethod::Exact)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let tie_term: f64 = tie_sizes
            .iter()
            .map(|&t| (t * t * t - t) as f64)
            .sum::<f64>()
            / 48.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
        let z = (statistic - mean) / libm::sqrt(var);
        let p = libm::erfc(libm::fabs(z) / core::f64::consts::SQRT_2);
        (
            p.clamp(f64::MIN_POSITIVE, 1.0),
            WilcoxonMethod::NormalApprox,
        )
    };

    Ok(WilcoxonResult {
        statistic,
        n_effective: n,
        p_value,
        method,
        degenerate: false,
    })
}

/// Ranks of `|d|` (1-based, ties averaged) times two, plus the size of every
/// tie group.
fn doubled_ranks(diffs: &[f64]) -> (Vec<u64>, Vec<u64>) {
    let n = diffs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| libm::fabs(diffs[i]).total_cmp(&libm::fabs(diffs[j])));
    let mut ranks = alloc::vec![0u64; n];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < n {
        let mag = libm::fabs(diffs[order[start]]);
        let mut end = start + 1;
        while end < n && libm::fabs(diffs[order[end]]) == mag {
            end += 1;
        }
        for &i in &order[start..end] {
            ranks[i] = (start + 1 + end) as u64;
        }
        ties.push((end - start) as u64);
        start = end;
    }
    (ranks, ties)
}

/// Number of sign assignments giving each value of the doubled statistic
/// `2W`, for the given doubled ranks. Index `s` holds the count for `2W = s`;
/// the counts sum to `2^n`.
pub fn exact_null_counts(doubled_ranks: &[u64]) -> Vec<u64> {
    let max: usize = doubled_ranks.iter().sum::<u64>() as usize;
    let mut counts = alloc::vec![0u64; max + 1];
    counts[0] = 1;
    let mut reach = 0;
    for &r in doubled_ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    counts
}
