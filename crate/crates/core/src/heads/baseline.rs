use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HeadKind;
use crate::error::{Error, Result};
use crate::label::{NumLevels, RankLabel};

/// Most frequent training label, ties to the lowest level.
pub fn majority_label(train_labels: &[RankLabel]) -> Result<RankLabel> {
    let max = train_labels
        .iter()
        .map(|l| l.index())
        .max()
        .ok_or_else(|| Error::domain("majority baseline needs training labels"))?;
    let mut counts = vec![0usize; max + 1];
    for l in train_labels {
        counts[l.index()] += 1;
    }
    let mut best = 1;
    for i in 2..=max {
        if counts[i] > counts[best] {
            best = i;
        }
    }
    Ok(RankLabel::from_index(best))
}

/// Hard predictions of the label-only baselines.
pub fn baseline_predict(
    kind: HeadKind,
    train_labels: &[RankLabel],
    levels: NumLevels,
    eval_size: usize,
    seed: u64,
) -> Result<Vec<RankLabel>> {
    match kind {
        HeadKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..eval_size)
                .map(|_| RankLabel::from_index(rng.random_range(1..=levels.get())))
                .collect())
        }
        HeadKind::Majority => {
            let label = majority_label(train_labels)?.check(levels)?;
            Ok(vec![label; eval_size])
        }
        other => Err(Error::domain(format!("{other} is not a baseline"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(i: usize) -> RankLabel {
        RankLabel::from_index(i)
    }

    #[test]
    fn majority_picks_mode() {
        let mut train = vec![r(2); 620];
        train.extend(vec![r(1); 250]);
        train.extend(vec![r(3); 130]);
        let k = NumLevels::new(3).unwrap();
        let preds = baseline_predict(HeadKind::Majority, &train, k, 4, 0).unwrap();
        assert_eq!(preds, vec![r(2); 4]);
    }

    #[test]
    fn majority_tie_goes_low() {
        assert_eq!(majority_label(&[r(2), r(1), r(2), r(1)]).unwrap(), r(1));
        assert!(majority_label(&[]).is_err());
    }

    #[test]
    fn random_is_reproducible_and_in_range() {
        let k = NumLevels::new(5).unwrap();
        let a = baseline_predict(HeadKind::Random, &[], k, 100, 9).unwrap();
        let b = baseline_predict(HeadKind::Random, &[], k, 100, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|l| (1..=5).contains(&l.index())));
        let c = baseline_predict(HeadKind::Random, &[], k, 100, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn trained_kind_rejected() {
        let k = NumLevels::new(3).unwrap();
        assert!(baseline_predict(HeadKind::Coral, &[r(1)], k, 1, 0).is_err());
    }
}
