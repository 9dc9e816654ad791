//! Rank labels and their extended binary encoding.
//!
//! Ranks are 1-based everywhere: level `1` is the lowest of `K` levels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of ordinal levels `K` (always at least 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct NumLevels(usize);

impl NumLevels {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("need at least 2 levels, got {k}")));
        }
        Ok(NumLevels(k))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// Number of binary tasks / finite thresholds, `K - 1`.
    #[inline]
    pub fn thresholds(self) -> usize {
        self.0 - 1
    }

    pub fn labels(self) -> impl Iterator<Item = RankLabel> {
        (1..=self.0).map(RankLabel)
    }

    pub fn label(self, index: usize) -> Result<RankLabel> {
        RankLabel::new(index, self)
    }
}

impl TryFrom<usize> for NumLevels {
    type Error = Error;

    fn try_from(k: usize) -> Result<Self> {
        NumLevels::new(k)
    }
}

impl From<NumLevels> for usize {
    fn from(k: NumLevels) -> usize {
        k.0
    }
}

impl fmt::Display for NumLevels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A 1-based ordinal level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RankLabel(usize);

impl RankLabel {
    /// Validated constructor: `1 <= index <= K`.
    pub fn new(index: usize, levels: NumLevels) -> Result<Self> {
        if index == 0 || index > levels.get() {
            return Err(Error::domain(format!(
                "rank {index} outside 1..={}",
                levels.get()
            )));
        }
        Ok(RankLabel(index))
    }

    /// Constructor for callers that have already validated the range.
    ///
    /// Panics on `index == 0`.
    pub fn from_index(index: usize) -> Self {
        assert!(index >= 1, "ranks are 1-based");
        RankLabel(index)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0
    }

    /// 0-based position, convenient for indexing `K`-length vectors.
    #[inline]
    pub fn zero_based(self) -> usize {
        self.0 - 1
    }

    pub fn check(self, levels: NumLevels) -> Result<Self> {
        RankLabel::new(self.0, levels)
    }

    pub fn distance(self, other: RankLabel) -> usize {
        self.0.abs_diff(other.0)
    }
}

impl fmt::Display for RankLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `K - 1` bits with bit `k` set iff the rank exceeds level `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtendedBinaryLabels {
    bits: Vec<bool>,
}

impl ExtendedBinaryLabels {
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Bits as 0/1 targets.
    pub fn targets<T: num_traits::Zero + num_traits::One>(&self) -> Vec<T> {
        self.bits
            .iter()
            .map(|&b| if b { T::one() } else { T::zero() })
            .collect()
    }
}

/// Encode a rank as `K - 1` "greater than level k" indicators.
pub fn extend_labels(label: RankLabel, levels: NumLevels) -> Result<ExtendedBinaryLabels> {
    let label = label.check(levels)?;
    let bits = (1..levels.get()).map(|k| label.index() > k).collect();
    Ok(ExtendedBinaryLabels { bits })
}
