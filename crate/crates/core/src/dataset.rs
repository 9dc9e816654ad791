use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::label::{NumLevels, RankLabel};
use crate::nn::Matrix;
use crate::scalar::Real;

/// Feature matrix with one rank label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct OrdinalDataset<T> {
    features: Matrix<T>,
    labels: Vec<RankLabel>,
    levels: NumLevels,
    /// Added to a rank when printing, e.g. `2` renders level 1 as "3".
    display_offset: i64,
}

impl<T: Real> OrdinalDataset<T> {
    pub fn new(features: Matrix<T>, labels: Vec<RankLabel>, levels: NumLevels) -> Result<Self> {
        if features.rows() == 0 || features.cols() == 0 {
            return Err(Error::domain("dataset needs at least one sample and one feature"));
        }
        if features.rows() != labels.len() {
            return Err(Error::domain(format!(
                "{} feature rows but {} labels",
                features.rows(),
                labels.len()
            )));
        }
        if let Some(pos) = features.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "non-finite feature in row {}",
                pos / features.cols() + 1
            )));
        }
        for label in &labels {
            label.check(levels)?;
        }
        Ok(OrdinalDataset {
            features,
            labels,
            levels,
            display_offset: 0,
        })
    }

    pub fn with_display_offset(mut self, offset: i64) -> Self {
        self.display_offset = offset;
        self
    }

    pub fn features(&self) -> &Matrix<T> {
        &self.features
    }

    pub fn labels(&self) -> &[RankLabel] {
        &self.labels
    }

    pub fn num_levels(&self) -> NumLevels {
        self.levels
    }

    pub fn display_offset(&self) -> i64 {
        self.display_offset
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    /// Rows selected by `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let features = self.features.select_rows(indices);
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Ok(OrdinalDataset::new(features, labels, self.levels)?.with_display_offset(self.display_offset))
    }

    pub fn class_counts(&self) -> BTreeMap<RankLabel, usize> {
        let mut counts = BTreeMap::new();
        for &l in &self.labels {
            *counts.entry(l).or_insert(0) += 1;
        }
        counts
    }

    pub fn cast<U: Real>(&self) -> OrdinalDataset<U> {
        OrdinalDataset {
            features: self.features.map(|v| U::lit(v.to_f64().unwrap_or(f64::NAN))),
            labels: self.labels.clone(),
            levels: self.levels,
            display_offset: self.display_offset,
        }
    }
}
