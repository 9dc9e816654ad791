use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::OrdinalDataset;
use crate::error::{Error, Result};
use crate::forecast::CumulativeForecast;
use crate::heads::{HeadKind, HeadOptions, OutputHead, Prediction};
use crate::label::{NumLevels, RankLabel};
use crate::metrics::{evaluate, MetricReport, DEFAULT_ADJACENT_WITHIN};
use crate::nn::{Matrix, Network, ParamGroup};
use crate::scalar::Real;

/// Backbone plus output head.
///
/// Flat parameter order is the backbone's `(weights, bias)` per layer followed
/// by the head's tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T> {
    backbone: Network<T>,
    head: OutputHead<T>,
}

impl<T: Real> Model<T> {
    /// Seeded model: backbone layers first, then the head, from one stream.
    pub fn new(
        kind: HeadKind,
        input_dim: usize,
        hidden: &[usize],
        levels: NumLevels,
        options: HeadOptions,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let backbone = Network::new(input_dim, hidden, &mut rng)?;
        let head = OutputHead::new(kind, backbone.output_dim(), levels, options, &mut rng)?;
        Ok(Model { backbone, head })
    }

    pub fn from_parts(backbone: Network<T>, head: OutputHead<T>) -> Result<Self> {
        if backbone.output_dim() != head.in_dim() {
            return Err(Error::domain(format!(
                "backbone emits {} features, head expects {}",
                backbone.output_dim(),
                head.in_dim()
            )));
        }
        Ok(Model { backbone, head })
    }

    pub fn kind(&self) -> HeadKind {
        self.head.kind()
    }

    pub fn levels(&self) -> NumLevels {
        self.head.levels()
    }

    pub fn backbone(&self) -> &Network<T> {
        &self.backbone
    }

    pub fn head(&self) -> &OutputHead<T> {
        &self.head
    }

    pub fn head_mut(&mut self) -> &mut OutputHead<T> {
        &mut self.head
    }

    pub fn backbone_mut(&mut self) -> &mut Network<T> {
        &mut self.backbone
    }

    pub fn params(&self) -> Vec<&[T]> {
        let mut p = self.backbone.params();
        p.extend(self.head.params());
        p
    }

    pub fn params_mut(&mut self) -> Vec<&mut [T]> {
        let mut p = self.backbone.params_mut();
        p.extend(self.head.params_mut());
        p
    }

    pub fn param_sizes(&self) -> Vec<usize> {
        self.params().iter().map(|p| p.len()).collect()
    }

    /// Default group at multiplier 1, plus the head's fast tensors at `fast_multiplier`.
    pub fn param_groups(&self, fast_multiplier: f64) -> Vec<ParamGroup> {
        let offset = self.backbone.params().len();
        let total = offset + self.head.params().len();
        let fast: Vec<usize> = self.head.fast_params().iter().map(|i| i + offset).collect();
        let base = (0..total).filter(|i| !fast.contains(i)).collect();
        let mut groups = vec![ParamGroup::new("default", base, 1.0)];
        if !fast.is_empty() {
            groups.push(ParamGroup::new("thresholds_and_bias", fast, fast_multiplier));
        }
        groups
    }

    pub fn loss(&self, x: &Matrix<T>, labels: &[RankLabel]) -> Result<T> {
        let h = self.backbone.forward(x)?;
        self.head.loss(&h, labels)
    }

    /// Batch loss and gradients in flat parameter order.
    pub fn loss_and_grad(&mut self, x: &Matrix<T>, labels: &[RankLabel]) -> Result<(T, Vec<Vec<T>>)> {
        let h = self.backbone.forward_recorded(x)?;
        let head_grad = self.head.loss_and_grad(&h, labels)?;
        let net_grad = self.backbone.backward(&head_grad.input)?;
        let mut grads: Vec<Vec<T>> = Vec::with_capacity(net_grad.layers.len() * 2 + 3);
        for (dw, db) in net_grad.layers {
            grads.push(dw);
            grads.push(db);
        }
        grads.extend(head_grad.params);
        Ok((head_grad.loss, grads))
    }

    pub fn predict(&self, x: &Matrix<T>) -> Result<Vec<Prediction<T>>> {
        let h = self.backbone.forward(x)?;
        self.head.predict(&h)
    }

    /// Full metric suite on a labelled dataset.
    pub fn evaluate(&self, data: &OrdinalDataset<T>) -> Result<MetricReport> {
        let preds = self.predict(data.features())?;
        report_from_predictions(preds, data.labels())
    }
}

pub(crate) fn report_from_predictions<T: Real>(
    preds: Vec<Prediction<T>>,
    labels: &[RankLabel],
) -> Result<MetricReport> {
    let decoded: Vec<RankLabel> = preds.iter().map(|p| p.label).collect();
    let forecasts: Vec<CumulativeForecast<T>> = preds.into_iter().map(|p| p.forecast).collect();
    evaluate(&forecasts, &decoded, labels, DEFAULT_ADJACENT_WITHIN)
}
