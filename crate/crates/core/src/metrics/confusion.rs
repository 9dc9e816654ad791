use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::label::{NumLevels, RankLabel};

/// `K x K` counts indexed `[true][predicted]` (0-based positions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    levels: NumLevels,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_predictions(
        predictions: &[RankLabel],
        labels: &[RankLabel],
        levels: NumLevels,
    ) -> Result<Self> {
        if predictions.len() != labels.len() {
            return Err(Error::domain(format!(
                "{} predictions but {} labels",
                predictions.len(),
                labels.len()
            )));
        }
        let k = levels.get();
        let mut counts = vec![vec![0u64; k]; k];
        for (&p, &y) in predictions.iter().zip(labels) {
            let p = p.check(levels)?;
            let y = y.check(levels)?;
            counts[y.zero_based()][p.zero_based()] += 1;
        }
        Ok(ConfusionMatrix { levels, counts })
    }

    pub fn levels(&self) -> NumLevels {
        self.levels
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn count(&self, truth: RankLabel, predicted: RankLabel) -> u64 {
        self.counts[truth.zero_based()][predicted.zero_based()]
    }

    /// True classes without any sample (their normalized rows are all zero).
    pub fn empty_rows(&self) -> Vec<RankLabel> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, row)| row.iter().all(|&c| c == 0))
            .map(|(i, _)| RankLabel::from_index(i + 1))
            .collect()
    }

    /// Row-normalized matrix: each non-empty row sums to one.
    pub fn normalized(&self) -> NormalizedConfusion {
        let rows = self
            .counts
            .iter()
            .map(|row| {
                let total: u64 = row.iter().sum();
                if total == 0 {
                    vec![0.0; row.len()]
                } else {
                    row.iter().map(|&c| c as f64 / total as f64).collect()
                }
            })
            .collect();
        NormalizedConfusion {
            levels: self.levels,
            rows,
            empty_rows: self.empty_rows(),
        }
    }

    pub fn to_csv(&self) -> String {
        render_csv(self.levels, |t, p| self.counts[t][p].to_string())
    }
}

/// Row-normalized confusion matrix, possibly averaged over runs.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedConfusion {
    levels: NumLevels,
    rows: Vec<Vec<f64>>,
    empty_rows: Vec<RankLabel>,
}

impl NormalizedConfusion {
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn levels(&self) -> NumLevels {
        self.levels
    }

    pub fn empty_rows(&self) -> &[RankLabel] {
        &self.empty_rows
    }

    /// Element-wise mean. A row counts as empty only if it is empty in every input.
    pub fn mean(matrices: &[NormalizedConfusion]) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::domain("no confusion matrices to average"))?;
        let k = first.levels.get();
        if matrices.iter().any(|m| m.levels != first.levels) {
            return Err(Error::domain("confusion matrices disagree on K"));
        }
        let n = matrices.len() as f64;
        let mut rows = vec![vec![0.0; k]; k];
        for m in matrices {
            for (acc_row, row) in rows.iter_mut().zip(&m.rows) {
                for (a, v) in acc_row.iter_mut().zip(row) {
                    *a += v;
                }
            }
        }
        for row in &mut rows {
            for v in row.iter_mut() {
                *v /= n;
            }
        }
        let empty_rows = first
            .empty_rows
            .iter()
            .copied()
            .filter(|r| matrices.iter().all(|m| m.empty_rows.contains(r)))
            .collect();
        Ok(NormalizedConfusion {
            levels: first.levels,
            rows,
            empty_rows,
        })
    }

    pub fn to_csv(&self) -> String {
        render_csv(self.levels, |t, p| format!("{:.6}", self.rows[t][p]))
    }
}

fn render_csv(levels: NumLevels, cell: impl Fn(usize, usize) -> String) -> String {
    let k = levels.get();
    let mut out = String::from("true\\pred");
    for p in 1..=k {
        let _ = write!(out, ",{p}");
    }
    out.push('\n');
    for t in 0..k {
        let _ = write!(out, "{}", t + 1);
        for p in 0..k {
            out.push(',');
            out.push_str(&cell(t, p));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[usize]) -> Vec<RankLabel> {
        v.iter().map(|&i| RankLabel::from_index(i)).collect()
    }

    #[test]
    fn hand_counted_rows() {
        let k = NumLevels::new(2).unwrap();
        let cm = ConfusionMatrix::from_predictions(&r(&[1, 2, 2]), &r(&[1, 1, 2]), k).unwrap();
        let n = cm.normalized();
        assert_eq!(n.rows()[0], vec![0.5, 0.5]);
        assert_eq!(n.rows()[1], vec![0.0, 1.0]);
        assert!(n.empty_rows().is_empty());
    }

    #[test]
    fn perfect_is_identity() {
        let k = NumLevels::new(3).unwrap();
        let y = r(&[1, 2, 3, 3, 2]);
        let n = ConfusionMatrix::from_predictions(&y, &y, k).unwrap().normalized();
        for (i, row) in n.rows().iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn majority_fills_one_column() {
        let k = NumLevels::new(3).unwrap();
        let y = r(&[1, 2, 3, 2, 2]);
        let p = r(&[2, 2, 2, 2, 2]);
        let n = ConfusionMatrix::from_predictions(&p, &y, k).unwrap().normalized();
        for row in n.rows() {
            assert_eq!(row, &vec![0.0, 1.0, 0.0]);
        }
    }

    #[test]
    fn empty_rows_flagged_and_zero() {
        let k = NumLevels::new(3).unwrap();
        let cm = ConfusionMatrix::from_predictions(&r(&[1, 3]), &r(&[1, 1]), k).unwrap();
        let n = cm.normalized();
        assert_eq!(n.empty_rows(), &r(&[2, 3])[..]);
        assert_eq!(n.rows()[2], vec![0.0; 3]);
    }

    #[test]
    fn rejects_out_of_range() {
        let k = NumLevels::new(2).unwrap();
        assert!(ConfusionMatrix::from_predictions(&r(&[3]), &r(&[1]), k).is_err());
    }

    #[test]
    fn csv_has_rank_headers() {
        let k = NumLevels::new(2).unwrap();
        let cm = ConfusionMatrix::from_predictions(&r(&[1, 2, 2]), &r(&[1, 1, 2]), k).unwrap();
        assert_eq!(cm.to_csv(), "true\\pred,1,2\n1,1,1\n2,0,1\n");
        assert_eq!(
            cm.normalized().to_csv(),
            "true\\pred,1,2\n1,0.500000,0.500000\n2,0.000000,1.000000\n"
        );
    }
}
