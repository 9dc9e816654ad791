#![allow(dead_code)]

use ordinal_core::heads::HeadOptions;
use ordinal_core::nn::Matrix;
use ordinal_core::{HeadKind, Model, NumLevels, RankLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn levels(k: usize) -> NumLevels {
    NumLevels::new(k).unwrap()
}

pub fn label(i: usize) -> RankLabel {
    RankLabel::from_index(i)
}

pub fn random_labels(rng: &mut impl Rng, n: usize, k: usize) -> Vec<RankLabel> {
    (0..n).map(|_| label(rng.random_range(1..=k))).collect()
}

pub fn normal_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix<f64> {
    let data = (0..rows * cols)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}

/// Random model with every parameter jittered away from its initial value.
pub fn jittered_model(rng: &mut impl Rng, kind: HeadKind, d: usize, hidden: &[usize], k: usize) -> Model {
    let mut model = Model::new(kind, d, hidden, levels(k), HeadOptions::default(), rng.random()).unwrap();
    for tensor in model.params_mut() {
        for v in tensor.iter_mut() {
            *v += 0.3 * rng.sample::<f64, _>(StandardNormal);
        }
    }
    model
}

/// Worst coordinate of an analytic-vs-central-difference gradient comparison.
#[derive(Debug, Clone, Copy, Default)]
pub struct GradCheck {
    pub max_rel_err: f64,
    pub checked: usize,
    pub skipped: usize,
}

impl GradCheck {
    pub fn merge(self, other: GradCheck) -> GradCheck {
        GradCheck {
            max_rel_err: self.max_rel_err.max(other.max_rel_err),
            checked: self.checked + other.checked,
            skipped: self.skipped + other.skipped,
        }
    }
}

pub const FD_STEP: f64 = 1e-5;
/// Relative errors use `max(|analytic|, |numeric|, FD_FLOOR)` as the scale.
pub const FD_FLOOR: f64 = 1e-6;

/// Compare `model.loss_and_grad` against central differences on every parameter.
///
/// Coordinates whose perturbation flips a ReLU in the backbone are skipped: the
/// loss is not differentiable there.
#[allow(clippy::needless_range_loop)]
pub fn check_model_gradient(model: &mut Model, x: &Matrix<f64>, y: &[RankLabel]) -> GradCheck {
    let (_, grads) = model.loss_and_grad(x, y).unwrap();
    let mut result = GradCheck::default();
    for t in 0..grads.len() {
        for i in 0..grads[t].len() {
            let orig = model.params()[t][i];
            model.params_mut()[t][i] = orig + FD_STEP;
            let plus = model.loss(x, y).unwrap();
            let pattern_plus = model.backbone().activation_pattern(x).unwrap();
            model.params_mut()[t][i] = orig - FD_STEP;
            let minus = model.loss(x, y).unwrap();
            let pattern_minus = model.backbone().activation_pattern(x).unwrap();
            model.params_mut()[t][i] = orig;
            if pattern_plus != pattern_minus {
                result.skipped += 1;
                continue;
            }
            let numeric = (plus - minus) / (2.0 * FD_STEP);
            let analytic = grads[t][i];
            let scale = analytic.abs().max(numeric.abs()).max(FD_FLOOR);
            result.max_rel_err = result.max_rel_err.max((analytic - numeric).abs() / scale);
            result.checked += 1;
        }
    }
    result
}

/// Random instance within d <= 8, K <= 7, batch <= 16.
pub fn gradient_instance(rng: &mut impl Rng, kind: HeadKind, hidden: &[usize]) -> GradCheck {
    let d = rng.random_range(1..=8);
    let k = rng.random_range(2..=7);
    let n = rng.random_range(1..=16);
    let mut model = jittered_model(rng, kind, d, hidden, k);
    let x = normal_matrix(rng, n, d);
    let y = random_labels(rng, n, k);
    check_model_gradient(&mut model, &x, &y)
}
