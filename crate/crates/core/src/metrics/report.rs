use std::fmt::Write as _;

use serde::Serialize;

use super::{accuracy, adjacent_accuracy, balanced_drps, drps, rmse, ClassWeights, ConfusionMatrix};
use crate::error::{Error, Result};
use crate::forecast::{degenerate_forecast, CumulativeForecast};
use crate::label::{NumLevels, RankLabel};
use crate::scalar::Scalar;

pub const DEFAULT_ADJACENT_WITHIN: usize = 1;

/// Every score for one set of predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub num_samples: usize,
    pub levels: NumLevels,
    pub drps: f64,
    pub balanced_drps: f64,
    pub drps_degenerate: f64,
    pub balanced_drps_degenerate: f64,
    pub rmse: f64,
    pub accuracy: f64,
    pub adjacent_within: usize,
    pub adjacent_accuracy: f64,
    pub confusion: ConfusionMatrix,
    /// Levels without any evaluation sample; excluded from the balanced scores.
    pub absent_classes: Vec<RankLabel>,
}

/// Scalar metrics in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    BalancedDrps,
    BalancedDrpsDegenerate,
    Rmse,
    Accuracy,
    Drps,
    DrpsDegenerate,
    AdjacentAccuracy,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::BalancedDrps,
        Metric::BalancedDrpsDegenerate,
        Metric::Rmse,
        Metric::Accuracy,
        Metric::Drps,
        Metric::DrpsDegenerate,
        Metric::AdjacentAccuracy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::BalancedDrps => "balanced_drps",
            Metric::BalancedDrpsDegenerate => "balanced_drps_degenerate",
            Metric::Rmse => "rmse",
            Metric::Accuracy => "accuracy",
            Metric::Drps => "drps",
            Metric::DrpsDegenerate => "drps_degenerate",
            Metric::AdjacentAccuracy => "adjacent_accuracy",
        }
    }

    pub fn from_name(name: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn lower_is_better(self) -> bool {
        !matches!(self, Metric::Accuracy | Metric::AdjacentAccuracy)
    }
}

impl MetricReport {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::BalancedDrps => self.balanced_drps,
            Metric::BalancedDrpsDegenerate => self.balanced_drps_degenerate,
            Metric::Rmse => self.rmse,
            Metric::Accuracy => self.accuracy,
            Metric::Drps => self.drps,
            Metric::DrpsDegenerate => self.drps_degenerate,
            Metric::AdjacentAccuracy => self.adjacent_accuracy,
        }
    }

    /// `key=value` lines.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "num_samples={}", self.num_samples);
        let _ = writeln!(out, "levels={}", self.levels);
        for m in Metric::ALL {
            let _ = writeln!(out, "{}={}", m.name(), self.get(m));
        }
        let _ = writeln!(out, "adjacent_within={}", self.adjacent_within);
        let absent: Vec<String> = self.absent_classes.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(out, "absent_classes={}", absent.join(" "));
        out
    }

    /// `metric,mean,std` rows; a single report has no spread so std is blank.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,mean,std\n");
        for m in Metric::ALL {
            let _ = writeln!(out, "{},{},", m.name(), self.get(m));
        }
        out
    }
}

/// Score a batch of probabilistic forecasts plus their decoded hard labels.
///
/// The degenerate scores replace each forecast with a one-hot at the decoded
/// label, so label-only predictors get identical probabilistic and degenerate
/// columns.
pub fn evaluate<T: Scalar>(
    forecasts: &[CumulativeForecast<T>],
    decoded: &[RankLabel],
    labels: &[RankLabel],
    within: usize,
) -> Result<MetricReport> {
    if decoded.len() != labels.len() {
        return Err(Error::domain(format!(
            "{} decoded labels but {} truth labels",
            decoded.len(),
            labels.len()
        )));
    }
    let drps_v = drps(forecasts, labels)?;
    let balanced = balanced_drps(forecasts, labels)?;
    let levels = forecasts[0].num_levels();
    let degenerate = decoded
        .iter()
        .map(|&d| degenerate_forecast::<T>(d, levels).map(CumulativeForecast::from))
        .collect::<Result<Vec<_>>>()?;
    let drps_deg = drps(&degenerate, labels)?;
    let balanced_deg = balanced_drps(&degenerate, labels)?;
    let confusion = ConfusionMatrix::from_predictions(decoded, labels, levels)?;
    Ok(MetricReport {
        num_samples: labels.len(),
        levels,
        drps: drps_v.to_f64_lossy(),
        balanced_drps: balanced.to_f64_lossy(),
        drps_degenerate: drps_deg.to_f64_lossy(),
        balanced_drps_degenerate: balanced_deg.to_f64_lossy(),
        rmse: rmse(decoded, labels)?,
        accuracy: accuracy(decoded, labels)?,
        adjacent_within: within,
        adjacent_accuracy: adjacent_accuracy(decoded, labels, within)?,
        confusion,
        absent_classes: ClassWeights::from_labels(labels).absent(levels),
    })
}
