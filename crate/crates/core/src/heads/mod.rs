//! Output strategies for ordinal targets.
//!
//! Six trainable heads (discretized regression, classification, OR-NN,
//! CORAL, CORN, ordered logit) and two label-only baselines. Each head owns
//! its parameters, loss and gradient, forecast extraction and hard decoding.

mod baseline;
mod binary;
mod classification;
mod coral;
mod corn;
mod head;
pub mod math;
mod ordered_logit;
mod regression;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use baseline::{baseline_predict, majority_label};
pub use binary::{binary_task_decode, binary_task_forecast, ornn_loss};
pub use classification::{classification_decode, classification_loss, softmax};
pub use coral::{coral_forward_and_loss, coral_task_probs};
pub use corn::{chain_conditionals, corn_loss, corn_target, corn_unconditional};
pub use head::{CoralParams, HeadGrad, HeadOptions, HeadParams, OrderedLogitParams, OutputHead, Prediction};
pub use ordered_logit::{
    ordered_logit_decode, ordered_logit_init, ordered_logit_nll, ordered_logit_probs,
    ordered_logit_sample_grad, thresholds, OrderedLogitInit, OrderedLogitSampleGrad, PROB_FLOOR,
};
pub use regression::{regression_decode, regression_loss};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadKind {
    Regression,
    Classification,
    #[serde(rename = "ornn")]
    OrNn,
    Coral,
    Corn,
    OrderedLogit,
    Random,
    Majority,
}

impl HeadKind {
    pub const ALL: [HeadKind; 8] = [
        HeadKind::Random,
        HeadKind::Majority,
        HeadKind::Regression,
        HeadKind::Classification,
        HeadKind::OrNn,
        HeadKind::Coral,
        HeadKind::Corn,
        HeadKind::OrderedLogit,
    ];

    pub const TRAINED: [HeadKind; 6] = [
        HeadKind::Regression,
        HeadKind::Classification,
        HeadKind::OrNn,
        HeadKind::Coral,
        HeadKind::Corn,
        HeadKind::OrderedLogit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HeadKind::Regression => "regression",
            HeadKind::Classification => "classification",
            HeadKind::OrNn => "ornn",
            HeadKind::Coral => "coral",
            HeadKind::Corn => "corn",
            HeadKind::OrderedLogit => "ordered_logit",
            HeadKind::Random => "random",
            HeadKind::Majority => "majority",
        }
    }

    /// Row label used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            HeadKind::Regression => "Regression",
            HeadKind::Classification => "Classification",
            HeadKind::OrNn => "OR-NN",
            HeadKind::Coral => "CORAL",
            HeadKind::Corn => "CORN",
            HeadKind::OrderedLogit => "OrderedLogitNN",
            HeadKind::Random => "Random",
            HeadKind::Majority => "Majority",
        }
    }

    pub fn is_baseline(self) -> bool {
        matches!(self, HeadKind::Random | HeadKind::Majority)
    }

    /// Heads that only emit hard labels, so probabilistic and degenerate scores coincide.
    pub fn is_label_only(self) -> bool {
        self.is_baseline() || self == HeadKind::Regression
    }
}

impl fmt::Display for HeadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeadKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        HeadKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = HeadKind::ALL.iter().map(|k| k.name()).collect();
            Error::Config(format!(
                "unknown head '{s}', expected one of {}",
                names.join(", ")
            ))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in HeadKind::ALL {
            assert_eq!(k.name().parse::<HeadKind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(json, format!("\"{}\"", k.name()));
        }
        assert!("probit".parse::<HeadKind>().is_err());
    }
}
