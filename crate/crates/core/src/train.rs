//! Mini-batch training loop with validation-based checkpoint selection.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::OrdinalDataset;
use crate::error::{Error, Result};
use crate::heads::{HeadKind, HeadOptions};
use crate::model::Model;
use crate::nn::{Adam, AdamConfig, StepContext};
use crate::scalar::Real;

/// Which epoch's parameters a run keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CheckpointMetric {
    /// Lowest validation balanced DRPS.
    #[default]
    BalancedDrps,
    /// Parameters after the last epoch.
    Final,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub base_lr: f64,
    pub seed: u64,
    pub hidden_sizes: Vec<usize>,
    /// Held out from the training data when no validation set is given.
    pub validation_fraction: f64,
    pub checkpoint_metric: CheckpointMetric,
    /// Stop once the epoch-to-epoch training loss change falls below this.
    pub convergence_tol: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30,
            batch_size: 64,
            base_lr: 1e-3,
            seed: 0,
            hidden_sizes: vec![64, 64],
            validation_fraction: 0.1,
            checkpoint_metric: CheckpointMetric::BalancedDrps,
            convergence_tol: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if !(self.base_lr > 0.0 && self.base_lr.is_finite()) {
            return Err(Error::Config(format!(
                "base_lr must be positive, got {}",
                self.base_lr
            )));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::Config(format!(
                "validation_fraction must be in [0, 1), got {}",
                self.validation_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    /// Loss over the full training set after the epoch.
    pub train_loss: f64,
    pub validation_balanced_drps: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    pub model: Model<T>,
    pub history: Vec<EpochStats>,
    /// 1-based epoch whose parameters were kept.
    pub selected_epoch: usize,
    pub converged: bool,
}

/// Seeded split of `data` into `(train, holdout)` with `fraction` held out.
pub fn holdout_split<T: Real>(
    data: &OrdinalDataset<T>,
    fraction: f64,
    seed: u64,
) -> Result<(OrdinalDataset<T>, Option<OrdinalDataset<T>>)> {
    let n = data.len();
    let held = (fraction * n as f64).round() as usize;
    if held == 0 || held >= n {
        return Ok((data.clone(), None));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    idx.shuffle(&mut rng);
    let (hold, keep) = idx.split_at(held);
    let mut keep = keep.to_vec();
    let mut hold = hold.to_vec();
    keep.sort_unstable();
    hold.sort_unstable();
    Ok((data.subset(&keep)?, Some(data.subset(&hold)?)))
}

/// Train a fresh model of `kind` on `train`.
pub fn train<T: Real>(
    kind: HeadKind,
    train: &OrdinalDataset<T>,
    validation: Option<&OrdinalDataset<T>>,
    config: &TrainConfig,
    options: HeadOptions,
) -> Result<TrainOutcome<T>> {
    config.validate()?;
    let model = Model::new(
        kind,
        train.dim(),
        &config.hidden_sizes,
        train.num_levels(),
        options,
        config.seed,
    )?;
    train_model(model, train, validation, config, options.lr_multiplier)
}

/// Continue training an existing model.
pub fn train_model<T: Real>(
    mut model: Model<T>,
    train: &OrdinalDataset<T>,
    validation: Option<&OrdinalDataset<T>>,
    config: &TrainConfig,
    fast_multiplier: f64,
) -> Result<TrainOutcome<T>> {
    config.validate()?;
    if train.num_levels() != model.levels() {
        return Err(Error::domain(format!(
            "model has {} levels, training data {}",
            model.levels(),
            train.num_levels()
        )));
    }
    let (train, split_off) = match validation {
        Some(_) => (train.clone(), None),
        None => holdout_split(train, config.validation_fraction, config.seed)?,
    };
    let validation = validation.or(split_off.as_ref());
    let select_best = config.checkpoint_metric == CheckpointMetric::BalancedDrps && validation.is_some();

    let opt_config = AdamConfig {
        lr: config.base_lr,
        ..AdamConfig::default()
    };
    let mut adam = Adam::new(
        opt_config,
        &model.param_sizes(),
        &model.param_groups(fast_multiplier),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);

    let n = train.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, Model<T>)> = None;
    let mut prev_loss: Option<f64> = None;
    let mut converged = false;

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            let ctx = StepContext { epoch, batch: b + 1 };
            let x = train.features().select_rows(chunk);
            let y: Vec<_> = chunk.iter().map(|&i| train.labels()[i]).collect();
            let (loss, grads) = model.loss_and_grad(&x, &y).map_err(|e| e.at(ctx))?;
            if !loss.is_finite() {
                return Err(Error::Training {
                    epoch,
                    batch: b + 1,
                    message: format!("loss diverged to {loss}"),
                });
            }
            adam.step(&mut model.params_mut(), &grads, ctx)?;
        }
        let end_ctx = StepContext { epoch, batch: 0 };
        let train_loss = model
            .loss(train.features(), train.labels())
            .map_err(|e| e.at(end_ctx))?
            .to_f64_lossy();
        if !train_loss.is_finite() {
            return Err(Error::Training {
                epoch,
                batch: 0,
                message: format!("training loss diverged to {train_loss}"),
            });
        }
        let val_score = match validation {
            Some(v) => Some(model.evaluate(v).map_err(|e| e.at(end_ctx))?.balanced_drps),
            None => None,
        };
        history.push(EpochStats {
            epoch,
            train_loss,
            validation_balanced_drps: val_score,
        });
        if select_best {
            let score = val_score.expect("validation present");
            if best.as_ref().is_none_or(|(s, _, _)| score < *s) {
                best = Some((score, epoch, model.clone()));
            }
        }
        if let (Some(tol), Some(prev)) = (config.convergence_tol, prev_loss) {
            if (prev - train_loss).abs() < tol {
                converged = true;
                break;
            }
        }
        prev_loss = Some(train_loss);
    }

    let last_epoch = history.last().map_or(0, |h| h.epoch);
    let (model, selected_epoch) = match best {
        Some((_, epoch, m)) => (m, epoch),
        None => (model, last_epoch),
    };
    Ok(TrainOutcome {
        model,
        history,
        selected_epoch,
        converged,
    })
}
