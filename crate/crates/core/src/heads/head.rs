use rand::Rng;

use super::binary::{binary_task_decode, binary_task_forecast};
use super::classification::{classification_loss, softmax};
use super::corn::{corn_target, corn_unconditional};
use super::math::{bce_with_logit, sigmoid};
use super::ordered_logit::{ordered_logit_init, ordered_logit_probs, ordered_logit_sample_grad};
use super::regression::{regression_decode, regression_loss};
use super::HeadKind;
use crate::error::{Error, Result};
use crate::forecast::{degenerate_forecast, CategoricalForecast, CumulativeForecast};
use crate::label::{extend_labels, NumLevels, RankLabel};
use crate::nn::{Dense, Matrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadOptions {
    /// Repair crossing OR-NN cumulative values with a running maximum.
    pub isotonic: bool,
    /// Learning-rate multiplier for the ordered logit bias and increments.
    pub lr_multiplier: f64,
}

impl Default for HeadOptions {
    fn default() -> Self {
        HeadOptions {
            isotonic: false,
            lr_multiplier: 100.0,
        }
    }
}

/// Shared weight vector with one bias per binary task.
#[derive(Debug, Clone, PartialEq)]
pub struct CoralParams<T> {
    pub weights: Vec<T>,
    pub biases: Vec<T>,
}

/// Score weights, score bias and `K - 2` cutpoint increments.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedLogitParams<T> {
    pub weights: Vec<T>,
    pub bias: T,
    pub delta: Vec<T>,
}

impl<T: Real> OrderedLogitParams<T> {
    pub fn thresholds(&self) -> Vec<T> {
        super::ordered_logit::thresholds(&self.delta)
    }
}

/// Trainable output layer parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum HeadParams<T> {
    Regression(Dense<T>),
    Classification(Dense<T>),
    /// Independent weights per binary task.
    OrNn(Dense<T>),
    Coral(CoralParams<T>),
    /// Independent weights per conditional task.
    Corn(Dense<T>),
    OrderedLogit(OrderedLogitParams<T>),
}

/// Output of a head for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<T> {
    pub label: RankLabel,
    pub forecast: CumulativeForecast<T>,
    /// Full distribution when the head produces one.
    pub categorical: Option<CategoricalForecast<T>>,
    /// `P(y > k)` for the extended binary heads.
    pub task_probs: Option<Vec<T>>,
}

/// Batch loss with gradients for the head parameters and its input.
#[derive(Debug, Clone)]
pub struct HeadGrad<T> {
    pub loss: T,
    /// Same order as [`OutputHead::params`].
    pub params: Vec<Vec<T>>,
    pub input: Matrix<T>,
}

/// An output strategy attached to a backbone with `in_dim` outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputHead<T> {
    levels: NumLevels,
    isotonic: bool,
    params: HeadParams<T>,
}

impl<T: Real> OutputHead<T> {
    pub fn new<R: Rng + ?Sized>(
        kind: HeadKind,
        in_dim: usize,
        levels: NumLevels,
        options: HeadOptions,
        rng: &mut R,
    ) -> Result<Self> {
        let tasks = levels.thresholds();
        let params = match kind {
            HeadKind::Regression => HeadParams::Regression(Dense::fan_in_uniform(in_dim, 1, rng)),
            HeadKind::Classification => {
                HeadParams::Classification(Dense::fan_in_uniform(in_dim, levels.get(), rng))
            }
            HeadKind::OrNn => HeadParams::OrNn(Dense::fan_in_uniform(in_dim, tasks, rng)),
            HeadKind::Coral => {
                let dense = Dense::<T>::fan_in_uniform(in_dim, 1, rng);
                HeadParams::Coral(CoralParams {
                    weights: dense.weights,
                    biases: vec![T::zero(); tasks],
                })
            }
            HeadKind::Corn => HeadParams::Corn(Dense::fan_in_uniform(in_dim, tasks, rng)),
            HeadKind::OrderedLogit => {
                let dense = Dense::<T>::fan_in_uniform(in_dim, 1, rng);
                let init = ordered_logit_init::<T>(levels.get())?;
                HeadParams::OrderedLogit(OrderedLogitParams {
                    weights: dense.weights,
                    bias: init.bias,
                    delta: init.delta,
                })
            }
            HeadKind::Random | HeadKind::Majority => {
                return Err(Error::domain(format!("{kind} has no trainable head")))
            }
        };
        Ok(OutputHead {
            levels,
            isotonic: options.isotonic,
            params,
        })
    }

    pub fn from_params(levels: NumLevels, isotonic: bool, params: HeadParams<T>) -> Result<Self> {
        let k = levels.get();
        let ok = match &params {
            HeadParams::Regression(d) => d.out_dim() == 1,
            HeadParams::Classification(d) => d.out_dim() == k,
            HeadParams::OrNn(d) | HeadParams::Corn(d) => d.out_dim() == k - 1,
            HeadParams::Coral(c) => c.biases.len() == k - 1,
            HeadParams::OrderedLogit(o) => o.delta.len() == k - 2,
        };
        if !ok {
            return Err(Error::domain(format!("head parameters do not fit K = {k}")));
        }
        Ok(OutputHead {
            levels,
            isotonic,
            params,
        })
    }

    pub fn kind(&self) -> HeadKind {
        match self.params {
            HeadParams::Regression(_) => HeadKind::Regression,
            HeadParams::Classification(_) => HeadKind::Classification,
            HeadParams::OrNn(_) => HeadKind::OrNn,
            HeadParams::Coral(_) => HeadKind::Coral,
            HeadParams::Corn(_) => HeadKind::Corn,
            HeadParams::OrderedLogit(_) => HeadKind::OrderedLogit,
        }
    }

    pub fn levels(&self) -> NumLevels {
        self.levels
    }

    pub fn isotonic(&self) -> bool {
        self.isotonic
    }

    pub fn params_ref(&self) -> &HeadParams<T> {
        &self.params
    }

    pub fn params_struct_mut(&mut self) -> &mut HeadParams<T> {
        &mut self.params
    }

    pub fn in_dim(&self) -> usize {
        match &self.params {
            HeadParams::Regression(d)
            | HeadParams::Classification(d)
            | HeadParams::OrNn(d)
            | HeadParams::Corn(d) => d.in_dim(),
            HeadParams::Coral(c) => c.weights.len(),
            HeadParams::OrderedLogit(o) => o.weights.len(),
        }
    }

    pub fn params(&self) -> Vec<&[T]> {
        match &self.params {
            HeadParams::Regression(d)
            | HeadParams::Classification(d)
            | HeadParams::OrNn(d)
            | HeadParams::Corn(d) => vec![d.weights.as_slice(), d.bias.as_slice()],
            HeadParams::Coral(c) => vec![c.weights.as_slice(), c.biases.as_slice()],
            HeadParams::OrderedLogit(o) => vec![
                o.weights.as_slice(),
                std::slice::from_ref(&o.bias),
                o.delta.as_slice(),
            ],
        }
    }

    pub fn params_mut(&mut self) -> Vec<&mut [T]> {
        match &mut self.params {
            HeadParams::Regression(d)
            | HeadParams::Classification(d)
            | HeadParams::OrNn(d)
            | HeadParams::Corn(d) => vec![d.weights.as_mut_slice(), d.bias.as_mut_slice()],
            HeadParams::Coral(c) => vec![c.weights.as_mut_slice(), c.biases.as_mut_slice()],
            HeadParams::OrderedLogit(o) => vec![
                o.weights.as_mut_slice(),
                std::slice::from_mut(&mut o.bias),
                o.delta.as_mut_slice(),
            ],
        }
    }

    /// Positions (within [`OutputHead::params`]) trained with the fast multiplier.
    pub fn fast_params(&self) -> Vec<usize> {
        match self.params {
            HeadParams::OrderedLogit(_) => vec![1, 2],
            _ => Vec::new(),
        }
    }

    fn check_batch(&self, h: &Matrix<T>, labels: &[RankLabel]) -> Result<()> {
        if h.cols() != self.in_dim() {
            return Err(Error::domain(format!(
                "head expects {} inputs, got {}",
                self.in_dim(),
                h.cols()
            )));
        }
        if h.rows() != labels.len() || labels.is_empty() {
            return Err(Error::domain(format!(
                "{} rows for {} labels",
                h.rows(),
                labels.len()
            )));
        }
        for l in labels {
            l.check(self.levels)?;
        }
        Ok(())
    }

    /// Scalar score `w.h (+ b)` for the single-score heads.
    fn scores(weights: &[T], bias: T, h: &Matrix<T>) -> Vec<T> {
        h.iter_rows()
            .map(|row| weights.iter().zip(row).fold(bias, |acc, (&w, &x)| acc + w * x))
            .collect()
    }

    pub fn loss(&self, h: &Matrix<T>, labels: &[RankLabel]) -> Result<T> {
        Ok(self.loss_and_grad(h, labels)?.loss)
    }

    pub fn loss_and_grad(&self, h: &Matrix<T>, labels: &[RankLabel]) -> Result<HeadGrad<T>> {
        self.check_batch(h, labels)?;
        let b = T::from_count(labels.len());
        match &self.params {
            HeadParams::Regression(d) => {
                let out = d.forward(h);
                let mut loss = T::zero();
                let mut dz = Matrix::zeros(out.rows(), 1);
                for (i, &y) in labels.iter().enumerate() {
                    let s = *out.get(i, 0);
                    loss += regression_loss(s, y)?;
                    dz.row_mut(i)[0] = T::lit(2.0) * (s - T::from_count(y.index())) / b;
                }
                Ok(dense_grad(d, h, &dz, loss / b))
            }
            HeadParams::Classification(d) => {
                let out = d.forward(h);
                let mut loss = T::zero();
                let mut dz = Matrix::zeros(out.rows(), out.cols());
                for (i, &y) in labels.iter().enumerate() {
                    let p = softmax(out.row(i))?;
                    loss += classification_loss(out.row(i), y)?;
                    for (j, (g, &pj)) in dz.row_mut(i).iter_mut().zip(p.probs()).enumerate() {
                        let t = if j == y.zero_based() { T::one() } else { T::zero() };
                        *g = (pj - t) / b;
                    }
                }
                Ok(dense_grad(d, h, &dz, loss / b))
            }
            HeadParams::OrNn(d) => {
                let out = d.forward(h);
                check_finite(out.as_slice())?;
                let mut loss = T::zero();
                let mut dz = Matrix::zeros(out.rows(), out.cols());
                for (i, &y) in labels.iter().enumerate() {
                    let targets = extend_labels(y, self.levels)?.targets::<T>();
                    for ((g, &z), t) in dz.row_mut(i).iter_mut().zip(out.row(i)).zip(targets) {
                        loss += bce_with_logit(z, t);
                        *g = (sigmoid(z) - t) / b;
                    }
                }
                Ok(dense_grad(d, h, &dz, loss / b))
            }
            HeadParams::Corn(d) => {
                let out = d.forward(h);
                check_finite(out.as_slice())?;
                let mut loss = T::zero();
                let mut count = 0usize;
                let mut dz = Matrix::zeros(out.rows(), out.cols());
                for (i, &y) in labels.iter().enumerate() {
                    for (k, (g, &z)) in dz.row_mut(i).iter_mut().zip(out.row(i)).enumerate() {
                        if let Some(t) = corn_target(y, k + 1) {
                            let t = if t { T::one() } else { T::zero() };
                            loss += bce_with_logit(z, t);
                            *g = sigmoid(z) - t;
                            count += 1;
                        }
                    }
                }
                let n = T::from_count(count.max(1));
                for g in dz.as_mut_slice() {
                    *g /= n;
                }
                Ok(dense_grad(d, h, &dz, loss / n))
            }
            HeadParams::Coral(c) => {
                let scores = Self::scores(&c.weights, T::zero(), h);
                check_finite(&scores)?;
                let mut loss = T::zero();
                let mut d_bias = vec![T::zero(); c.biases.len()];
                let mut d_score = Vec::with_capacity(scores.len());
                for (&s, &y) in scores.iter().zip(labels) {
                    let targets = extend_labels(y, self.levels)?.targets::<T>();
                    let mut ds = T::zero();
                    for ((db, &bk), t) in d_bias.iter_mut().zip(&c.biases).zip(targets) {
                        let z = s + bk;
                        loss += bce_with_logit(z, t);
                        let g = (sigmoid(z) - t) / b;
                        *db += g;
                        ds += g;
                    }
                    d_score.push(ds);
                }
                let (d_w, d_h) = score_backprop(&c.weights, h, &d_score);
                Ok(HeadGrad {
                    loss: loss / b,
                    params: vec![d_w, d_bias],
                    input: d_h,
                })
            }
            HeadParams::OrderedLogit(o) => {
                let scores = Self::scores(&o.weights, o.bias, h);
                let mut loss = T::zero();
                let mut d_delta = vec![T::zero(); o.delta.len()];
                let mut d_score = Vec::with_capacity(scores.len());
                for (&s, &y) in scores.iter().zip(labels) {
                    let g = ordered_logit_sample_grad(s, &o.delta, y)?;
                    loss += g.loss;
                    for (acc, v) in d_delta.iter_mut().zip(&g.d_delta) {
                        *acc += *v / b;
                    }
                    d_score.push(g.d_score / b);
                }
                let d_bias: T = d_score.iter().copied().sum();
                let (d_w, d_h) = score_backprop(&o.weights, h, &d_score);
                Ok(HeadGrad {
                    loss: loss / b,
                    params: vec![d_w, vec![d_bias], d_delta],
                    input: d_h,
                })
            }
        }
    }

    pub fn predict(&self, h: &Matrix<T>) -> Result<Vec<Prediction<T>>> {
        if h.cols() != self.in_dim() {
            return Err(Error::domain(format!(
                "head expects {} inputs, got {}",
                self.in_dim(),
                h.cols()
            )));
        }
        let levels = self.levels;
        match &self.params {
            HeadParams::Regression(d) => {
                let out = d.forward(h);
                (0..out.rows())
                    .map(|i| {
                        let label = regression_decode(*out.get(i, 0), levels)?;
                        Ok(Prediction {
                            label,
                            forecast: degenerate_forecast(label, levels)?.into(),
                            categorical: None,
                            task_probs: None,
                        })
                    })
                    .collect()
            }
            HeadParams::Classification(d) => {
                let out = d.forward(h);
                out.iter_rows()
                    .map(|row| {
                        let p = softmax(row)?;
                        Ok(Prediction {
                            label: p.argmax(),
                            forecast: p.to_cumulative(),
                            categorical: Some(p),
                            task_probs: None,
                        })
                    })
                    .collect()
            }
            HeadParams::OrNn(d) => {
                let out = d.forward(h);
                check_finite(out.as_slice())?;
                out.iter_rows()
                    .map(|row| self.binary_prediction(row.iter().map(|&z| sigmoid(z)).collect()))
                    .collect()
            }
            HeadParams::Corn(d) => {
                let out = d.forward(h);
                check_finite(out.as_slice())?;
                out.iter_rows()
                    .map(|row| self.binary_prediction(corn_unconditional(row)))
                    .collect()
            }
            HeadParams::Coral(c) => {
                let scores = Self::scores(&c.weights, T::zero(), h);
                scores
                    .into_iter()
                    .map(|s| {
                        let probs = super::coral::coral_task_probs(s, &c.biases)?;
                        self.binary_prediction(probs)
                    })
                    .collect()
            }
            HeadParams::OrderedLogit(o) => Self::scores(&o.weights, o.bias, h)
                .into_iter()
                .map(|s| {
                    let p = ordered_logit_probs(s, &o.delta)?;
                    Ok(Prediction {
                        label: p.argmax(),
                        forecast: p.to_cumulative(),
                        categorical: Some(p),
                        task_probs: None,
                    })
                })
                .collect(),
        }
    }

    fn binary_prediction(&self, task_probs: Vec<T>) -> Result<Prediction<T>> {
        Ok(Prediction {
            label: binary_task_decode(&task_probs)?,
            forecast: binary_task_forecast(&task_probs, self.isotonic)?,
            categorical: None,
            task_probs: Some(task_probs),
        })
    }
}

fn check_finite<T: Real>(values: &[T]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Training {
            epoch: 0,
            batch: 0,
            message: "non-finite head output".into(),
        });
    }
    Ok(())
}

fn dense_grad<T: Real>(d: &Dense<T>, h: &Matrix<T>, dz: &Matrix<T>, loss: T) -> HeadGrad<T> {
    let (dw, db, dh) = d.backward(h, dz);
    HeadGrad {
        loss,
        params: vec![dw, db],
        input: dh,
    }
}

/// Gradients of a linear score `s_i = w.h_i + b` given `dL/ds_i`.
fn score_backprop<T: Real>(weights: &[T], h: &Matrix<T>, d_score: &[T]) -> (Vec<T>, Matrix<T>) {
    let mut d_w = vec![T::zero(); weights.len()];
    let mut d_h = Matrix::zeros(h.rows(), h.cols());
    for (i, &ds) in d_score.iter().enumerate() {
        for (j, (&x, &w)) in h.row(i).iter().zip(weights).enumerate() {
            d_w[j] += ds * x;
            d_h.row_mut(i)[j] = ds * w;
        }
    }
    (d_w, d_h)
}
