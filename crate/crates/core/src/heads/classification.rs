use super::math::log_sum_exp;
use crate::error::{Error, Result};
use crate::forecast::CategoricalForecast;
use crate::label::RankLabel;
use crate::scalar::Real;

fn check_logits<T: Real>(logits: &[T]) -> Result<()> {
    if logits.iter().any(|v| !v.is_finite()) {
        return Err(Error::Training {
            epoch: 0,
            batch: 0,
            message: "non-finite classification logits".into(),
        });
    }
    Ok(())
}

pub fn softmax<T: Real>(logits: &[T]) -> Result<CategoricalForecast<T>> {
    check_logits(logits)?;
    let m = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let e: Vec<T> = logits.iter().map(|&z| (z - m).exp()).collect();
    let s: T = e.iter().copied().sum();
    CategoricalForecast::new(e.into_iter().map(|v| v / s).collect())
}

/// `-log softmax(logits)[label]`.
pub fn classification_loss<T: Real>(logits: &[T], label: RankLabel) -> Result<T> {
    check_logits(logits)?;
    Ok(log_sum_exp(logits) - logits[label.zero_based()])
}

/// Argmax with ties to the lowest level.
pub fn classification_decode<T: Real>(forecast: &CategoricalForecast<T>) -> RankLabel {
    forecast.argmax()
}
