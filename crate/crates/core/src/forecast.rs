//! Probabilistic forecasts over ordinal levels.

use crate::error::{Error, Result};
use crate::label::{NumLevels, RankLabel};
use crate::scalar::Scalar;

/// Probability vector over `K` levels.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalForecast<T> {
    probs: Vec<T>,
}

impl<T: Scalar> CategoricalForecast<T> {
    /// Validates that every entry lies in `[0, 1]` and the sum is one.
    pub fn new(probs: Vec<T>) -> Result<Self> {
        let levels = NumLevels::new(probs.len())?;
        let mut total = T::zero();
        for (i, p) in probs.iter().enumerate() {
            if !p.is_finite_value() || *p < T::zero() || *p > T::one() {
                return Err(Error::domain(format!(
                    "probability {:?} at level {} outside [0, 1]",
                    p,
                    i + 1
                )));
            }
            total = total + p.clone();
        }
        let dev = if total > T::one() {
            total.clone() - T::one()
        } else {
            T::one() - total.clone()
        };
        if dev > T::sum_tolerance() {
            return Err(Error::domain(format!(
                "probabilities over {levels} levels sum to {total:?}, expected 1"
            )));
        }
        Ok(CategoricalForecast { probs })
    }

    /// Uniform distribution over `K` levels.
    pub fn uniform(levels: NumLevels) -> Self {
        let p = T::one() / T::from_count(levels.get());
        CategoricalForecast {
            probs: vec![p; levels.get()],
        }
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<T> {
        self.probs
    }

    pub fn num_levels(&self) -> NumLevels {
        NumLevels::new(self.probs.len()).expect("validated on construction")
    }

    pub fn prob(&self, label: RankLabel) -> &T {
        &self.probs[label.zero_based()]
    }

    /// Most probable level; ties go to the lowest index.
    pub fn argmax(&self) -> RankLabel {
        let mut best = 0;
        for (i, p) in self.probs.iter().enumerate().skip(1) {
            if *p > self.probs[best] {
                best = i;
            }
        }
        RankLabel::from_index(best + 1)
    }

    pub fn to_cumulative(&self) -> CumulativeForecast<T> {
        to_cumulative(self)
    }
}

/// Raw cumulative values `F_k = P(y <= k)` for `k = 1..K-1`.
///
/// Monotonicity is not enforced: extended binary heads without a consistency
/// constraint can produce crossing task probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeForecast<T> {
    cdf: Vec<T>,
}

impl<T: Scalar> CumulativeForecast<T> {
    pub fn new(cdf: Vec<T>) -> Result<Self> {
        if cdf.is_empty() {
            return Err(Error::domain("cumulative forecast needs K-1 >= 1 values"));
        }
        for (i, c) in cdf.iter().enumerate() {
            if !c.is_finite_value() || *c < T::zero() || *c > T::one() {
                return Err(Error::domain(format!(
                    "cumulative value {:?} at threshold {} outside [0, 1]",
                    c,
                    i + 1
                )));
            }
        }
        Ok(CumulativeForecast { cdf })
    }

    pub fn cdf(&self) -> &[T] {
        &self.cdf
    }

    pub fn num_levels(&self) -> NumLevels {
        NumLevels::new(self.cdf.len() + 1).expect("non-empty cdf")
    }

    pub fn is_monotone(&self) -> bool {
        self.cdf.windows(2).all(|w| w[0] <= w[1])
    }

    /// Running maximum, the isotonic repair of a crossing cdf.
    pub fn isotonic(&self) -> Self {
        let mut out = Vec::with_capacity(self.cdf.len());
        let mut running = T::zero();
        for c in &self.cdf {
            if *c > running {
                running = c.clone();
            }
            out.push(running.clone());
        }
        CumulativeForecast { cdf: out }
    }
}

impl<T: Scalar> From<&CategoricalForecast<T>> for CumulativeForecast<T> {
    fn from(f: &CategoricalForecast<T>) -> Self {
        to_cumulative(f)
    }
}

impl<T: Scalar> From<CategoricalForecast<T>> for CumulativeForecast<T> {
    fn from(f: CategoricalForecast<T>) -> Self {
        to_cumulative(&f)
    }
}

/// One-hot forecast at `label`.
pub fn degenerate_forecast<T: Scalar>(label: RankLabel, levels: NumLevels) -> Result<CategoricalForecast<T>> {
    let label = label.check(levels)?;
    let mut probs = vec![T::zero(); levels.get()];
    probs[label.zero_based()] = T::one();
    Ok(CategoricalForecast { probs })
}

/// Partial sums of the first `K - 1` probabilities.
pub fn to_cumulative<T: Scalar>(forecast: &CategoricalForecast<T>) -> CumulativeForecast<T> {
    let k = forecast.probs.len();
    let mut cdf = Vec::with_capacity(k - 1);
    let mut acc = T::zero();
    for p in &forecast.probs[..k - 1] {
        acc = acc + p.clone();
        // rounding can push the partial sum a hair above one
        if acc > T::one() {
            acc = T::one();
        }
        cdf.push(acc.clone());
    }
    CumulativeForecast { cdf }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn k(n: usize) -> NumLevels {
        NumLevels::new(n).unwrap()
    }

    #[test]
    fn degenerate_is_one_hot() {
        let f = degenerate_forecast::<f64>(RankLabel::from_index(2), k(3)).unwrap();
        assert_eq!(f.probs(), &[0.0, 1.0, 0.0]);
        let f = degenerate_forecast::<f64>(RankLabel::from_index(1), k(2)).unwrap();
        assert_eq!(f.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn degenerate_cdf_is_step() {
        let f = degenerate_forecast::<f64>(RankLabel::from_index(5), k(8)).unwrap();
        let cdf = f.to_cumulative();
        let expected: Vec<f64> = (1..8).map(|j| if j >= 5 { 1.0 } else { 0.0 }).collect();
        assert_eq!(cdf.cdf(), expected.as_slice());
    }

    #[test]
    fn degenerate_rejects_out_of_range() {
        assert!(degenerate_forecast::<f64>(RankLabel::from_index(4), k(3)).is_err());
    }

    #[test]
    fn cumulative_partial_sums() {
        let f = CategoricalForecast::new(vec![ratio(1, 5), ratio(1, 2), ratio(3, 10)]).unwrap();
        assert_eq!(f.to_cumulative().cdf(), &[ratio(1, 5), ratio(7, 10)]);

        let u = CategoricalForecast::<BigRational>::uniform(k(4));
        assert_eq!(u.to_cumulative().cdf(), &[ratio(1, 4), ratio(1, 2), ratio(3, 4)]);

        let hot = CategoricalForecast::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(hot.to_cumulative().cdf(), &[0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_probability_vectors() {
        assert!(CategoricalForecast::new(vec![0.2, 0.5, 0.1]).is_err());
        assert!(CategoricalForecast::new(vec![1.2, -0.2]).is_err());
        assert!(CategoricalForecast::new(vec![f64::NAN, 1.0]).is_err());
        assert!(CategoricalForecast::new(vec![1.0]).is_err());
        assert!(CategoricalForecast::new(vec![0.5, 0.5 + 1e-12]).is_ok());
    }

    #[test]
    fn argmax_ties_go_low() {
        let f = CategoricalForecast::new(vec![0.1, 0.4, 0.1, 0.4]).unwrap();
        assert_eq!(f.argmax().index(), 2);
        assert_eq!(CategoricalForecast::<f64>::uniform(k(5)).argmax().index(), 1);
    }

    #[test]
    fn isotonic_running_max() {
        let c = CumulativeForecast::new(vec![0.6, 0.4]).unwrap();
        assert!(!c.is_monotone());
        assert_eq!(c.isotonic().cdf(), &[0.6, 0.6]);
    }

    #[test]
    fn degenerate_roundtrip_through_argmax() {
        for levels in 2..=16 {
            for y in 1..=levels {
                let label = RankLabel::from_index(y);
                let f = degenerate_forecast::<f64>(label, k(levels)).unwrap();
                assert_eq!(f.argmax(), label);
            }
        }
    }
}
