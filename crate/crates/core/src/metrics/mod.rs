//! Scoring rules and classical metrics for ordinal predictions.
//!
//! The ranked probability score compares a forecast's cumulative
//! distribution with the step function of the observed level:
//!
//! ```text
//! DRPS = 1/N * sum_i sum_{k=1}^{K-1} (F_k(i) - 1{k >= y_i})^2
//! ```
//!
//! For one-hot forecasts this equals the mean absolute rank error. The
//! balanced variant is a macro average: per-class mean score, then the mean
//! over the classes present in the evaluation labels.

mod confusion;
mod report;

use std::collections::BTreeMap;

pub use confusion::{ConfusionMatrix, NormalizedConfusion};
pub use report::{evaluate, Metric, MetricReport, DEFAULT_ADJACENT_WITHIN};

use crate::error::{Error, Result};
use crate::forecast::CumulativeForecast;
use crate::label::{NumLevels, RankLabel};
use crate::scalar::Scalar;

/// Inverse-prevalence weights for the classes present in a label set.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassWeights {
    counts: BTreeMap<RankLabel, usize>,
}

impl ClassWeights {
    pub fn from_labels(labels: &[RankLabel]) -> Self {
        let mut counts = BTreeMap::new();
        for &l in labels {
            *counts.entry(l).or_insert(0usize) += 1;
        }
        ClassWeights { counts }
    }

    /// `1 / count(class)`, or `None` for a class absent from the labels.
    pub fn weight<T: Scalar>(&self, class: RankLabel) -> Option<T> {
        self.counts.get(&class).map(|&n| T::one() / T::from_count(n))
    }

    pub fn count(&self, class: RankLabel) -> usize {
        self.counts.get(&class).copied().unwrap_or(0)
    }

    pub fn present(&self) -> impl Iterator<Item = RankLabel> + '_ {
        self.counts.keys().copied()
    }

    pub fn num_present(&self) -> usize {
        self.counts.len()
    }

    /// Levels of `1..=K` that never occur.
    pub fn absent(&self, levels: NumLevels) -> Vec<RankLabel> {
        levels.labels().filter(|l| !self.counts.contains_key(l)).collect()
    }
}

/// Ranked probability score of a single forecast.
pub fn sample_drps<T: Scalar>(forecast: &CumulativeForecast<T>, label: RankLabel) -> T {
    let mut score = T::zero();
    for (i, f) in forecast.cdf().iter().enumerate() {
        let k = i + 1;
        let diff = if k >= label.index() {
            f.clone() - T::one()
        } else {
            f.clone()
        };
        score = score + diff.clone() * diff;
    }
    score
}

fn check_inputs<T: Scalar>(forecasts: &[CumulativeForecast<T>], labels: &[RankLabel]) -> Result<NumLevels> {
    if forecasts.len() != labels.len() {
        return Err(Error::domain(format!(
            "{} forecasts but {} labels",
            forecasts.len(),
            labels.len()
        )));
    }
    let first = forecasts
        .first()
        .ok_or_else(|| Error::domain("need at least one forecast"))?;
    let levels = first.num_levels();
    for (i, (f, l)) in forecasts.iter().zip(labels).enumerate() {
        if f.num_levels() != levels {
            return Err(Error::domain(format!(
                "forecast {i} has {} levels, expected {levels}",
                f.num_levels()
            )));
        }
        l.check(levels)?;
    }
    Ok(levels)
}

/// Mean ranked probability score.
pub fn drps<T: Scalar>(forecasts: &[CumulativeForecast<T>], labels: &[RankLabel]) -> Result<T> {
    check_inputs(forecasts, labels)?;
    let total = forecasts
        .iter()
        .zip(labels)
        .fold(T::zero(), |acc, (f, &y)| acc + sample_drps(f, y));
    Ok(total / T::from_count(labels.len()))
}

/// Class-balanced ranked probability score (macro average over present classes).
pub fn balanced_drps<T: Scalar>(forecasts: &[CumulativeForecast<T>], labels: &[RankLabel]) -> Result<T> {
    check_inputs(forecasts, labels)?;
    let mut per_class: BTreeMap<RankLabel, (T, usize)> = BTreeMap::new();
    for (f, &y) in forecasts.iter().zip(labels) {
        let entry = per_class.entry(y).or_insert((T::zero(), 0));
        entry.0 = entry.0.clone() + sample_drps(f, y);
        entry.1 += 1;
    }
    let classes = per_class.len();
    let total = per_class
        .into_values()
        .fold(T::zero(), |acc, (sum, n)| acc + sum / T::from_count(n));
    Ok(total / T::from_count(classes))
}

fn check_pairs(predictions: &[RankLabel], labels: &[RankLabel]) -> Result<()> {
    if predictions.len() != labels.len() {
        return Err(Error::domain(format!(
            "{} predictions but {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::domain("need at least one prediction"));
    }
    Ok(())
}

/// Root mean squared rank difference.
pub fn rmse(predictions: &[RankLabel], labels: &[RankLabel]) -> Result<f64> {
    check_pairs(predictions, labels)?;
    let sq: f64 = predictions
        .iter()
        .zip(labels)
        .map(|(p, y)| {
            let d = p.distance(*y) as f64;
            d * d
        })
        .sum();
    Ok((sq / labels.len() as f64).sqrt())
}

/// Fraction of exact matches.
pub fn accuracy(predictions: &[RankLabel], labels: &[RankLabel]) -> Result<f64> {
    adjacent_accuracy(predictions, labels, 0)
}

/// Fraction of predictions within `within` levels of the truth.
pub fn adjacent_accuracy(predictions: &[RankLabel], labels: &[RankLabel], within: usize) -> Result<f64> {
    check_pairs(predictions, labels)?;
    let hits = predictions
        .iter()
        .zip(labels)
        .filter(|(p, y)| p.distance(**y) <= within)
        .count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Mean absolute rank error.
pub fn mean_absolute_error(predictions: &[RankLabel], labels: &[RankLabel]) -> Result<f64> {
    check_pairs(predictions, labels)?;
    let total: usize = predictions.iter().zip(labels).map(|(p, y)| p.distance(*y)).sum();
    Ok(total as f64 / labels.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::{degenerate_forecast, CategoricalForecast};
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn r(i: usize) -> RankLabel {
        RankLabel::from_index(i)
    }

    fn k(n: usize) -> NumLevels {
        NumLevels::new(n).unwrap()
    }

    fn onehot(label: usize, levels: usize) -> CumulativeForecast<f64> {
        degenerate_forecast::<f64>(r(label), k(levels))
            .unwrap()
            .to_cumulative()
    }

    #[test]
    fn drps_degenerate_two_levels_off() {
        let score = drps(&[onehot(5, 9)], &[r(7)]).unwrap();
        assert_eq!(score, 2.0);
    }

    #[test]
    fn drps_zero_at_truth() {
        assert_eq!(drps(&[onehot(4, 6)], &[r(4)]).unwrap(), 0.0);
    }

    #[test]
    fn drps_single_term() {
        let f = CategoricalForecast::new(vec![0.5, 0.5]).unwrap().to_cumulative();
        assert_eq!(drps(&[f], &[r(1)]).unwrap(), 0.25);
    }

    #[test]
    fn drps_rejects_mismatch() {
        assert!(drps(&[onehot(1, 3)], &[r(1), r(2)]).is_err());
        assert!(drps(&[onehot(1, 3), onehot(1, 4)], &[r(1), r(2)]).is_err());
        assert!(drps(&[onehot(1, 3)], &[r(4)]).is_err());
        assert!(drps::<f64>(&[], &[]).is_err());
    }

    #[test]
    fn balanced_majority_three_levels() {
        // 25% / 62% / 13%, always predicting level 2
        let mut labels = vec![r(1); 25];
        labels.extend(vec![r(2); 62]);
        labels.extend(vec![r(3); 13]);
        let forecasts: Vec<_> = labels
            .iter()
            .map(|_| {
                degenerate_forecast::<BigRational>(r(2), k(3))
                    .unwrap()
                    .to_cumulative()
            })
            .collect();
        let exact = balanced_drps(&forecasts, &labels).unwrap();
        assert_eq!(exact, ratio(2, 3));
    }

    #[test]
    fn balanced_majority_seven_levels() {
        let counts = [120usize, 230, 300, 220, 180, 600, 90];
        let mut labels = Vec::new();
        for (c, &n) in counts.iter().enumerate() {
            labels.extend(std::iter::repeat_n(r(c + 1), n));
        }
        let forecasts: Vec<_> = labels.iter().map(|_| onehot(6, 7)).collect();
        let b = balanced_drps(&forecasts, &labels).unwrap();
        assert!((b - 16.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn balanced_equals_plain_when_balanced() {
        let labels = vec![r(1), r(2), r(3), r(1), r(2), r(3)];
        let forecasts: Vec<_> = [
            vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)],
            vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)],
            vec![ratio(0, 1), ratio(1, 5), ratio(4, 5)],
            vec![ratio(1, 1), ratio(0, 1), ratio(0, 1)],
            vec![ratio(1, 7), ratio(5, 7), ratio(1, 7)],
            vec![ratio(1, 2), ratio(0, 1), ratio(1, 2)],
        ]
        .into_iter()
        .map(|p| CategoricalForecast::new(p).unwrap().to_cumulative())
        .collect();
        assert_eq!(
            balanced_drps(&forecasts, &labels).unwrap(),
            drps(&forecasts, &labels).unwrap()
        );
    }

    #[test]
    fn class_weights_equalize_counts() {
        let labels = [r(1), r(1), r(3), r(1)];
        let w = ClassWeights::from_labels(&labels);
        assert_eq!(w.weight::<f64>(r(1)), Some(1.0 / 3.0));
        assert_eq!(w.weight::<f64>(r(2)), None);
        assert_eq!(w.absent(k(3)), vec![r(2)]);
        for c in w.present() {
            let total = w.weight::<num_rational::BigRational>(c).unwrap()
                * num_rational::BigRational::from_integer(w.count(c).into());
            assert_eq!(total, ratio(1, 1));
        }
    }

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[r(2), r(3)], &[r(2), r(3)]).unwrap(), 0.0);
        assert_eq!(rmse(&[r(1), r(3)], &[r(2), r(2)]).unwrap(), 1.0);
        assert_eq!(rmse(&[r(5)], &[r(7)]).unwrap(), 2.0);
        assert!(rmse(&[r(5)], &[]).is_err());
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[r(1), r(2)], &[r(1), r(2)]).unwrap(), 1.0);
        assert_eq!(
            accuracy(&[r(1), r(2), r(3)], &[r(1), r(2), r(2)]).unwrap(),
            2.0 / 3.0
        );
    }

    #[test]
    fn adjacent_accuracy_examples() {
        let p = [r(1), r(4), r(2)];
        let y = [r(2), r(2), r(2)];
        assert_eq!(adjacent_accuracy(&p, &y, 0).unwrap(), accuracy(&p, &y).unwrap());
        assert_eq!(adjacent_accuracy(&[r(1), r(4)], &[r(2), r(2)], 1).unwrap(), 0.5);
        assert_eq!(adjacent_accuracy(&[r(1), r(4)], &[r(4), r(1)], 3).unwrap(), 1.0);
    }

    #[test]
    fn spreading_mass_near_truth_beats_confident_miss() {
        let confident = onehot(5, 9);
        let spread = CategoricalForecast::new(vec![0.0, 0.0, 0.0, 0.2, 0.5, 0.3, 0.0, 0.0, 0.0])
            .unwrap()
            .to_cumulative();
        let truth = [r(7)];
        assert!(drps(&[spread], &truth).unwrap() < drps(&[confident], &truth).unwrap());
    }
}
