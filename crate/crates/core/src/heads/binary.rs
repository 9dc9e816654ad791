//! Shared pieces of the extended binary framework (OR-NN, CORAL, CORN).

use super::math::bce_with_logit;
use crate::error::{Error, Result};
use crate::forecast::CumulativeForecast;
use crate::label::{ExtendedBinaryLabels, RankLabel};
use crate::scalar::Real;

fn check_probs<T: Real>(task_probs: &[T]) -> Result<()> {
    if task_probs.is_empty() {
        return Err(Error::domain("need at least one binary task"));
    }
    if let Some((k, p)) = task_probs
        .iter()
        .enumerate()
        .find(|(_, p)| !(**p >= T::zero() && **p <= T::one()))
    {
        return Err(Error::domain(format!(
            "task {} probability {p} outside [0, 1]",
            k + 1
        )));
    }
    Ok(())
}

/// Sum of per-task binary cross-entropies for one sample.
pub fn ornn_loss<T: Real>(binary_logits: &[T], extended: &ExtendedBinaryLabels) -> Result<T> {
    if binary_logits.len() != extended.len() {
        return Err(Error::domain(format!(
            "{} logits for {} binary tasks",
            binary_logits.len(),
            extended.len()
        )));
    }
    if binary_logits.iter().any(|v| !v.is_finite()) {
        return Err(Error::Training {
            epoch: 0,
            batch: 0,
            message: "non-finite binary task logits".into(),
        });
    }
    Ok(binary_logits
        .iter()
        .zip(extended.targets::<T>())
        .map(|(&z, t)| bce_with_logit(z, t))
        .sum())
}

/// `1 + #{k : P(y > k) > 0.5}`; valid for rank-inconsistent inputs too.
pub fn binary_task_decode<T: Real>(task_probs: &[T]) -> Result<RankLabel> {
    check_probs(task_probs)?;
    let half = T::lit(0.5);
    Ok(RankLabel::from_index(
        1 + task_probs.iter().filter(|&&p| p > half).count(),
    ))
}

/// `F_k = 1 - P(y > k)`. With `isotonic`, crossing values are repaired by a running maximum.
pub fn binary_task_forecast<T: Real>(task_probs: &[T], isotonic: bool) -> Result<CumulativeForecast<T>> {
    check_probs(task_probs)?;
    let raw = CumulativeForecast::new(task_probs.iter().map(|&p| T::one() - p).collect())?;
    Ok(if isotonic { raw.isotonic() } else { raw })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::{extend_labels, NumLevels};

    #[test]
    fn ornn_loss_examples() {
        let k = NumLevels::new(3).unwrap();
        let ext = extend_labels(RankLabel::from_index(1), k).unwrap();
        let l = ornn_loss(&[0.0, 0.0], &ext).unwrap();
        assert!((l - 2.0 * std::f64::consts::LN_2).abs() < 1e-15);

        let ext = extend_labels(RankLabel::from_index(2), k).unwrap();
        assert!(ornn_loss(&[40.0, -40.0], &ext).unwrap() < 1e-15);
        assert!(ornn_loss(&[40.0], &ext).is_err());
    }

    #[test]
    fn decode_counts_confident_tasks() {
        assert_eq!(binary_task_decode(&[0.9, 0.8, 0.2, 0.1]).unwrap().index(), 3);
        assert_eq!(binary_task_decode(&[0.4, 0.1, 0.3]).unwrap().index(), 1);
        assert_eq!(binary_task_decode(&[0.4, 0.6]).unwrap().index(), 2);
        assert_eq!(binary_task_decode(&[0.5]).unwrap().index(), 1);
        assert!(binary_task_decode(&[1.2]).is_err());
        assert!(binary_task_decode(&[f64::NAN]).is_err());
    }

    #[test]
    fn forecast_complements() {
        let f = binary_task_forecast(&[0.9f64, 0.5, 0.1], false).unwrap();
        let expected = [0.1, 0.5, 0.9];
        for (a, b) in f.cdf().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let raw = binary_task_forecast(&[0.4f64, 0.6], false).unwrap();
        assert!((raw.cdf()[0] - 0.6).abs() < 1e-15 && (raw.cdf()[1] - 0.4).abs() < 1e-15);
        let iso = binary_task_forecast(&[0.4f64, 0.6], true).unwrap();
        assert_eq!(iso.cdf()[0], iso.cdf()[1]);
        assert!((iso.cdf()[1] - 0.6).abs() < 1e-15);
        assert_eq!(
            binary_task_forecast(&[1.0, 1.0, 0.0], false).unwrap().cdf(),
            &[0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn extended_labels_decode_back() {
        for levels in 2..=16 {
            let k = NumLevels::new(levels).unwrap();
            for y in k.labels() {
                let probs = extend_labels(y, k).unwrap().targets::<f64>();
                assert_eq!(binary_task_decode(&probs).unwrap(), y);
            }
        }
    }
}
