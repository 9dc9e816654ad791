//! Adaptive-moment optimizer with per-group learning-rate multipliers.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A set of parameter tensors sharing one learning-rate multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGroup {
    pub name: String,
    /// Indices into the model's flat parameter list.
    pub members: Vec<usize>,
    pub lr_multiplier: f64,
}

impl ParamGroup {
    pub fn new(name: impl Into<String>, members: Vec<usize>, lr_multiplier: f64) -> Self {
        ParamGroup {
            name: name.into(),
            members,
            lr_multiplier,
        }
    }
}

/// Where in training a step happens, for error context.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepContext {
    pub epoch: usize,
    pub batch: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Bias-corrected first/second moment optimizer state.
#[derive(Debug, Clone)]
pub struct Adam<T> {
    config: AdamConfig,
    step: i32,
    /// Effective learning rate per parameter tensor.
    lr: Vec<T>,
    m: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
}

impl<T: Real> Adam<T> {
    /// `sizes[i]` is the length of parameter tensor `i`. Every tensor must
    /// belong to exactly one group.
    pub fn new(config: AdamConfig, sizes: &[usize], groups: &[ParamGroup]) -> Result<Self> {
        if !(config.lr.is_finite() && config.lr > 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                config.lr
            )));
        }
        let mut lr: Vec<Option<T>> = vec![None; sizes.len()];
        for g in groups {
            if !(g.lr_multiplier.is_finite() && g.lr_multiplier > 0.0) {
                return Err(Error::Config(format!(
                    "group {} has non-positive multiplier {}",
                    g.name, g.lr_multiplier
                )));
            }
            for &i in &g.members {
                let slot = lr
                    .get_mut(i)
                    .ok_or_else(|| Error::Config(format!("group {} names unknown parameter {i}", g.name)))?;
                if slot.is_some() {
                    return Err(Error::Config(format!(
                        "parameter {i} belongs to more than one group"
                    )));
                }
                *slot = Some(T::lit(config.lr * g.lr_multiplier));
            }
        }
        let lr = lr
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::Config(format!("parameter {i} has no group"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Adam {
            config,
            step: 0,
            lr,
            m: sizes.iter().map(|&n| vec![T::zero(); n]).collect(),
            v: sizes.iter().map(|&n| vec![T::zero(); n]).collect(),
        })
    }

    pub fn steps_taken(&self) -> i32 {
        self.step
    }

    /// One update of every parameter tensor.
    ///
    /// Fails without touching any parameter if a gradient is non-finite.
    pub fn step(&mut self, params: &mut [&mut [T]], grads: &[Vec<T>], ctx: StepContext) -> Result<()> {
        if params.len() != self.lr.len() || grads.len() != self.lr.len() {
            return Err(Error::State(format!(
                "optimizer tracks {} tensors, got {} params and {} grads",
                self.lr.len(),
                params.len(),
                grads.len()
            )));
        }
        for (i, g) in grads.iter().enumerate() {
            if g.len() != self.m[i].len() || params[i].len() != self.m[i].len() {
                return Err(Error::State(format!("parameter {i} changed size")));
            }
            if let Some(j) = g.iter().position(|v| !v.is_finite()) {
                return Err(Error::Training {
                    epoch: ctx.epoch,
                    batch: ctx.batch,
                    message: format!("non-finite gradient in parameter {i}[{j}]"),
                });
            }
        }
        self.step += 1;
        let b1 = T::lit(self.config.beta1);
        let b2 = T::lit(self.config.beta2);
        let eps = T::lit(self.config.eps);
        let one = T::one();
        let c1 = one - b1.powi(self.step);
        let c2 = one - b2.powi(self.step);
        for (i, p) in params.iter_mut().enumerate() {
            let lr = self.lr[i];
            let (m, v) = (&mut self.m[i], &mut self.v[i]);
            for (j, &g) in grads[i].iter().enumerate() {
                m[j] = b1 * m[j] + (one - b1) * g;
                v[j] = b2 * v[j] + (one - b2) * g * g;
                let m_hat = m[j] / c1;
                let v_hat = v[j] / c2;
                p[j] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}
