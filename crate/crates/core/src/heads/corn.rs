//! Conditional extended binary head.
//!
//! Task `k` models `P(y > k | y > k-1)` and is trained only on samples that
//! reach level `k`; chaining the conditionals gives rank-consistent
//! unconditional probabilities.

use super::math::{bce_with_logit, sigmoid};
use crate::error::{Error, Result};
use crate::label::RankLabel;
use crate::nn::Matrix;
use crate::scalar::Real;

/// Whether sample `label` contributes to 1-based task `task`, and its target.
#[inline]
pub fn corn_target(label: RankLabel, task: usize) -> Option<bool> {
    (label.index() >= task).then(|| label.index() > task)
}

/// Mean BCE over contributing (sample, task) pairs.
///
/// Returns the loss and the number of contributing pairs. Tasks without any
/// contributing sample add nothing.
pub fn corn_loss<T: Real>(task_logits: &Matrix<T>, labels: &[RankLabel]) -> Result<(T, usize)> {
    if task_logits.rows() != labels.len() {
        return Err(Error::domain(format!(
            "{} logit rows for {} labels",
            task_logits.rows(),
            labels.len()
        )));
    }
    if task_logits.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Training {
            epoch: 0,
            batch: 0,
            message: "non-finite conditional task logits".into(),
        });
    }
    let mut total = T::zero();
    let mut count = 0usize;
    for (row, &y) in task_logits.iter_rows().zip(labels) {
        for (k, &z) in row.iter().enumerate() {
            if let Some(t) = corn_target(y, k + 1) {
                let t = if t { T::one() } else { T::zero() };
                total += bce_with_logit(z, t);
                count += 1;
            }
        }
    }
    if count == 0 {
        return Ok((T::zero(), 0));
    }
    Ok((total / T::from_count(count), count))
}

/// Running product of conditional sigmoids: `P(y > k) = prod_{j<=k} f_j`.
pub fn corn_unconditional<T: Real>(task_logits: &[T]) -> Vec<T> {
    let mut acc = T::one();
    task_logits
        .iter()
        .map(|&z| {
            acc *= sigmoid(z);
            acc
        })
        .collect()
}

/// Chain already-computed conditional probabilities.
pub fn chain_conditionals<T: Real>(conditional: &[T]) -> Vec<T> {
    let mut acc = T::one();
    conditional
        .iter()
        .map(|&p| {
            acc *= p;
            acc
        })
        .collect()
}
