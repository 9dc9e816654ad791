//! Ordinal prediction over `K` ranked levels.
//!
//! Six output heads (discretized regression, classification, OR-NN, CORAL,
//! CORN, ordered logit) sit on a small ReLU network trained with Adam. Scoring
//! centers on the discrete ranked probability score and its class-balanced
//! macro average. Numeric code is generic over [`Real`] (`f64`, `f32`); the
//! metrics also accept [`BigRational`] for exact arithmetic.

pub mod bench;
pub mod checkpoint;
pub mod data;
pub mod dataset;
pub mod error;
pub mod forecast;
pub mod heads;
pub mod label;
pub mod metrics;
pub mod model;
pub mod nn;
pub mod scalar;
pub mod train;

pub use num_rational::BigRational;

pub use checkpoint::Checkpoint;
pub use error::{Error, Result};
pub use forecast::degenerate_forecast;
pub use heads::{HeadKind, HeadOptions};
pub use label::{extend_labels, ExtendedBinaryLabels, NumLevels, RankLabel};
pub use metrics::{balanced_drps, drps, evaluate, Metric, MetricReport};
pub use scalar::{ratio, Real, Scalar};
pub use train::{train, CheckpointMetric, TrainConfig, TrainOutcome};

pub type CategoricalForecast = forecast::CategoricalForecast<f64>;
pub type CumulativeForecast = forecast::CumulativeForecast<f64>;
pub type ExactCategoricalForecast = forecast::CategoricalForecast<BigRational>;
pub type ExactCumulativeForecast = forecast::CumulativeForecast<BigRational>;
pub type OrdinalDataset = dataset::OrdinalDataset<f64>;
pub type Matrix = nn::Matrix<f64>;
pub type Network = nn::Network<f64>;
pub type Adam = nn::Adam<f64>;
pub type OutputHead = heads::OutputHead<f64>;
pub type Model = model::Model<f64>;
