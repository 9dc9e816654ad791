use crate::error::{Error, Result};
use crate::label::{NumLevels, RankLabel};
use crate::scalar::Real;

/// Squared error between a real-valued score and the rank index.
pub fn regression_loss<T: Real>(score: T, label: RankLabel) -> Result<T> {
    if !score.is_finite() {
        return Err(Error::Training {
            epoch: 0,
            batch: 0,
            message: format!("non-finite regression score {score}"),
        });
    }
    let d = score - T::from_count(label.index());
    Ok(d * d)
}

/// Nearest rank index; halves round up and out-of-range scores clamp to `[1, K]`.
pub fn regression_decode<T: Real>(score: T, levels: NumLevels) -> Result<RankLabel> {
    if !score.is_finite() {
        return Err(Error::Training {
            epoch: 0,
            batch: 0,
            message: format!("non-finite regression score {score}"),
        });
    }
    let rounded = (score + T::lit(0.5)).floor();
    let k = T::from_count(levels.get());
    let clamped = rounded.max(T::one()).min(k);
    Ok(RankLabel::from_index(
        clamped.to_usize().expect("clamped to 1..=K"),
    ))
}
