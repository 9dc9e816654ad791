//! Version-tagged JSON checkpoints.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heads::{CoralParams, HeadKind, HeadParams, OrderedLogitParams, OutputHead};
use crate::label::NumLevels;
use crate::model::Model;
use crate::nn::{Dense, Network};
use crate::scalar::Real;

pub const CHECKPOINT_FORMAT: &str = "ordinal-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseRecord {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeadRecord {
    Regression(DenseRecord),
    Classification(DenseRecord),
    #[serde(rename = "ornn")]
    OrNn(DenseRecord),
    Coral {
        weights: Vec<f64>,
        biases: Vec<f64>,
    },
    Corn(DenseRecord),
    OrderedLogit {
        weights: Vec<f64>,
        bias: f64,
        delta: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub head: HeadKind,
    pub levels: NumLevels,
    pub isotonic: bool,
    pub input_dim: usize,
    pub layers: Vec<DenseRecord>,
    pub head_params: HeadRecord,
}

fn to_f64<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64_lossy()).collect()
}

fn from_f64<T: Real>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::lit(x)).collect()
}

fn dense_record<T: Real>(d: &Dense<T>) -> DenseRecord {
    DenseRecord {
        in_dim: d.in_dim(),
        out_dim: d.out_dim(),
        weights: to_f64(&d.weights),
        bias: to_f64(&d.bias),
    }
}

fn dense_from<T: Real>(r: &DenseRecord) -> Result<Dense<T>> {
    Dense::from_parts(r.in_dim, r.out_dim, from_f64(&r.weights), from_f64(&r.bias))
}

impl Checkpoint {
    pub fn from_model<T: Real>(model: &Model<T>) -> Self {
        let head = model.head();
        let head_params = match head.params_ref() {
            HeadParams::Regression(d) => HeadRecord::Regression(dense_record(d)),
            HeadParams::Classification(d) => HeadRecord::Classification(dense_record(d)),
            HeadParams::OrNn(d) => HeadRecord::OrNn(dense_record(d)),
            HeadParams::Corn(d) => HeadRecord::Corn(dense_record(d)),
            HeadParams::Coral(c) => HeadRecord::Coral {
                weights: to_f64(&c.weights),
                biases: to_f64(&c.biases),
            },
            HeadParams::OrderedLogit(o) => HeadRecord::OrderedLogit {
                weights: to_f64(&o.weights),
                bias: o.bias.to_f64_lossy(),
                delta: to_f64(&o.delta),
            },
        };
        Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            head: model.kind(),
            levels: model.levels(),
            isotonic: head.isotonic(),
            input_dim: model.backbone().input_dim(),
            layers: model.backbone().layers().iter().map(dense_record).collect(),
            head_params,
        }
    }

    pub fn to_model<T: Real>(&self) -> Result<Model<T>> {
        if self.format != CHECKPOINT_FORMAT || self.version != CHECKPOINT_VERSION {
            return Err(Error::Config(format!(
                "unsupported checkpoint {} v{}",
                self.format, self.version
            )));
        }
        let layers = self.layers.iter().map(dense_from).collect::<Result<Vec<_>>>()?;
        let backbone = Network::from_layers(self.input_dim, layers)?;
        let params = match &self.head_params {
            HeadRecord::Regression(d) => HeadParams::Regression(dense_from(d)?),
            HeadRecord::Classification(d) => HeadParams::Classification(dense_from(d)?),
            HeadRecord::OrNn(d) => HeadParams::OrNn(dense_from(d)?),
            HeadRecord::Corn(d) => HeadParams::Corn(dense_from(d)?),
            HeadRecord::Coral { weights, biases } => HeadParams::Coral(CoralParams {
                weights: from_f64(weights),
                biases: from_f64(biases),
            }),
            HeadRecord::OrderedLogit { weights, bias, delta } => {
                HeadParams::OrderedLogit(OrderedLogitParams {
                    weights: from_f64(weights),
                    bias: T::lit(*bias),
                    delta: from_f64(delta),
                })
            }
        };
        let head = OutputHead::from_params(self.levels, self.isotonic, params)?;
        if head.kind() != self.head {
            return Err(Error::Config(format!(
                "checkpoint declares head {} but stores {} parameters",
                self.head,
                head.kind()
            )));
        }
        Model::from_parts(backbone, head)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: "<checkpoint>".into(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::Parse {
                path: path.display().to_string(),
                line,
                message,
            },
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heads::HeadOptions;

    #[test]
    fn round_trip_every_head() {
        let k = NumLevels::new(4).unwrap();
        for kind in HeadKind::TRAINED {
            let model = Model::<f64>::new(kind, 3, &[5], k, HeadOptions::default(), 11).unwrap();
            let ck = Checkpoint::from_model(&model);
            let back = Checkpoint::from_json(&ck.to_json())
                .unwrap()
                .to_model::<f64>()
                .unwrap();
            assert_eq!(back, model, "{kind}");
        }
    }

    #[test]
    fn rejects_wrong_version() {
        let k = NumLevels::new(3).unwrap();
        let model = Model::<f64>::new(HeadKind::Corn, 2, &[], k, HeadOptions::default(), 0).unwrap();
        let mut ck = Checkpoint::from_model(&model);
        ck.version = 99;
        assert!(ck.to_model::<f64>().is_err());
    }
}
