//! Shared-weight extended binary head.
//!
//! All `K - 1` tasks share one weight vector and differ only by bias, so the
//! task probabilities are non-increasing whenever the biases are.

use super::binary::ornn_loss;
use super::math::sigmoid;
use crate::error::{Error, Result};
use crate::label::ExtendedBinaryLabels;
use crate::scalar::Real;

/// `sigmoid(score + b_k)` for every task.
pub fn coral_task_probs<T: Real>(shared_score: T, biases: &[T]) -> Result<Vec<T>> {
    if !shared_score.is_finite() || biases.iter().any(|b| !b.is_finite()) {
        return Err(Error::Training {
            epoch: 0,
            batch: 0,
            message: "non-finite shared score or task bias".into(),
        });
    }
    Ok(biases.iter().map(|&b| sigmoid(shared_score + b)).collect())
}

/// Per-sample task probabilities and the summed binary cross-entropy.
pub fn coral_forward_and_loss<T: Real>(
    shared_score: T,
    biases: &[T],
    extended: &ExtendedBinaryLabels,
) -> Result<(Vec<T>, T)> {
    let probs = coral_task_probs(shared_score, biases)?;
    let logits: Vec<T> = biases.iter().map(|&b| shared_score + b).collect();
    let loss = ornn_loss(&logits, extended)?;
    Ok((probs, loss))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probs_from_biases() {
        let p = coral_task_probs(0.0f64, &[1.0, -1.0]).unwrap();
        assert!((p[0] - 0.7311).abs() < 1e-4);
        assert!((p[1] - 0.2689).abs() < 1e-4);
    }

    #[test]
    fn sorted_biases_give_monotone_probs() {
        let biases = [2.0, 0.5, 0.5, -1.0, -3.0];
        for s in [-10.0, -1.0, 0.0, 0.7, 4.0, 30.0] {
            let p = coral_task_probs(s, &biases).unwrap();
            assert!(p.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
