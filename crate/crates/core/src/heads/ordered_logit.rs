//! Ordered logit output layer.
//!
//! A scalar score `s = x.beta` and ordered cutpoints `0 = mu_0 < mu_1 < ... < mu_{K-2}`
//! define `P(y <= k) = sigmoid(mu_{k-1} - s)`. Cutpoints are stored as
//! unconstrained increments `delta`, `mu_j = mu_{j-1} + exp(delta_j)`, which
//! keeps them strictly increasing for every finite `delta`.

use super::math::{logistic_pdf, sigmoid, sigmoid_gap};
use crate::error::{Error, Result};
use crate::forecast::CategoricalForecast;
use crate::label::{NumLevels, RankLabel};
use crate::scalar::Real;

/// Floor applied to a class probability before taking its log.
pub const PROB_FLOOR: f64 = 1e-12;

/// Cutpoints `mu_0..mu_{K-2}` (the infinite endpoints are implicit).
pub fn thresholds<T: Real>(delta: &[T]) -> Vec<T> {
    let mut mu = Vec::with_capacity(delta.len() + 1);
    let mut acc = T::zero();
    mu.push(acc);
    for &d in delta {
        acc += d.exp();
        mu.push(acc);
    }
    mu
}

fn check_finite<T: Real>(score: T, delta: &[T]) -> Result<()> {
    if !score.is_finite() || delta.iter().any(|d| !d.is_finite()) {
        return Err(Error::Training {
            epoch: 0,
            batch: 0,
            message: "non-finite ordered logit score or threshold increment".into(),
        });
    }
    Ok(())
}

/// Probability of 1-based class `class` given cutpoints `mu` and score.
fn class_prob<T: Real>(mu: &[T], score: T, class: usize) -> T {
    let k = mu.len() + 1;
    if class == 1 {
        return sigmoid(mu[0] - score);
    }
    if class == k {
        return sigmoid(score - mu[k - 2]);
    }
    sigmoid_gap(mu[class - 1] - score, mu[class - 2] - score)
}

/// Class probabilities `F(mu_k - s) - F(mu_{k-1} - s)` under the logistic cdf.
pub fn ordered_logit_probs<T: Real>(score: T, delta: &[T]) -> Result<CategoricalForecast<T>> {
    check_finite(score, delta)?;
    let mu = thresholds(delta);
    let k = mu.len() + 1;
    let probs = (1..=k).map(|c| class_prob(&mu, score, c)).collect();
    CategoricalForecast::new(probs)
}

/// `-ln max(p[label], 1e-12)`.
pub fn ordered_logit_nll<T: Real>(probs: &CategoricalForecast<T>, label: RankLabel) -> T {
    -probs.prob(label).max(T::lit(PROB_FLOOR)).ln()
}

/// Loss and gradients of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedLogitSampleGrad<T> {
    pub loss: T,
    pub d_score: T,
    /// Gradient w.r.t. `delta` (length `K - 2`).
    pub d_delta: Vec<T>,
}

/// NLL of one sample with analytic gradients in the score and the increments.
pub fn ordered_logit_sample_grad<T: Real>(
    score: T,
    delta: &[T],
    label: RankLabel,
) -> Result<OrderedLogitSampleGrad<T>> {
    check_finite(score, delta)?;
    let mu = thresholds(delta);
    let k = mu.len() + 1;
    let c = label.index();
    if c > k {
        return Err(Error::domain(format!("rank {c} outside 1..={k}")));
    }
    let p = class_prob(&mu, score, c);
    let floor = T::lit(PROB_FLOOR);
    let mut d_delta = vec![T::zero(); delta.len()];
    if p < floor {
        // clamped: the loss is locally constant
        return Ok(OrderedLogitSampleGrad {
            loss: -floor.ln(),
            d_score: T::zero(),
            d_delta,
        });
    }
    let loss = -p.ln();
    // p = F(mu_upper - s) - F(mu_lower - s); indices into mu are 0-based
    let upper = (c < k).then(|| c - 1);
    let lower = (c >= 2).then(|| c - 2);
    let mut d_mu = vec![T::zero(); mu.len()];
    let mut d_score = T::zero();
    if let Some(u) = upper {
        let f = logistic_pdf(mu[u] - score);
        d_mu[u] -= f / p;
        d_score += f / p;
    }
    if let Some(l) = lower {
        let f = logistic_pdf(mu[l] - score);
        d_mu[l] += f / p;
        d_score -= f / p;
    }
    // mu_j = sum_{m<=j} exp(delta_m), delta_m is the increment into mu_m
    let mut tail = T::zero();
    for j in (1..mu.len()).rev() {
        tail += d_mu[j];
        d_delta[j - 1] = tail * delta[j - 1].exp();
    }
    Ok(OrderedLogitSampleGrad {
        loss,
        d_score,
        d_delta,
    })
}

/// Initial increments and output bias giving equal mass to every level.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedLogitInit<T> {
    pub delta: Vec<T>,
    pub bias: T,
}

/// Equal-mass initialization: logistic quantiles `t_j = logit(j/K)`, shifted so
/// the first cutpoint is zero, with the bias at `-t_1 = ln(K-1)`.
pub fn ordered_logit_init<T: Real>(levels: usize) -> Result<OrderedLogitInit<T>> {
    let levels = NumLevels::new(levels)?;
    let k = levels.get() as f64;
    let raw: Vec<f64> = (1..levels.get())
        .map(|j| {
            let q = j as f64 / k;
            (q / (1.0 - q)).ln()
        })
        .collect();
    let mu: Vec<f64> = raw.iter().map(|t| t - raw[0]).collect();
    let delta = mu.windows(2).map(|w| T::lit((w[1] - w[0]).ln())).collect();
    Ok(OrderedLogitInit {
        delta,
        bias: T::lit(-raw[0]),
    })
}

/// Argmax with ties to the lowest level.
pub fn ordered_logit_decode<T: Real>(probs: &CategoricalForecast<T>) -> RankLabel {
    probs.argmax()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_level_probs() {
        // mu = (0, 1) => delta = ln 1 = 0
        let f = ordered_logit_probs(0.0f64, &[0.0]).unwrap();
        let p = f.probs();
        assert!((p[0] - 0.5).abs() < 1e-4);
        assert!((p[1] - 0.2311).abs() < 1e-4);
        assert!((p[2] - 0.2689).abs() < 1e-4);
        assert_eq!(ordered_logit_decode(&f).index(), 1);
        let nll = ordered_logit_nll(&f, RankLabel::from_index(2));
        assert!((nll - 1.465).abs() < 1e-3);
    }

    #[test]
    fn large_score_moves_mass_up() {
        let f = ordered_logit_probs(60.0f64, &[0.3, -0.2]).unwrap();
        assert!((f.probs()[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn init_four_levels() {
        let init = ordered_logit_init::<f64>(4).unwrap();
        assert!((init.bias - 3f64.ln()).abs() < 1e-12);
        assert_eq!(init.delta.len(), 2);
        for d in &init.delta {
            assert!((d - 0.0941).abs() < 1e-4);
        }
        let mu = thresholds(&init.delta);
        assert!((mu[1] - 1.0986).abs() < 1e-4);
        assert!((mu[2] - 2.1972).abs() < 1e-4);
    }

    #[test]
    fn init_two_levels_and_errors() {
        let init = ordered_logit_init::<f64>(2).unwrap();
        assert!(init.delta.is_empty());
        assert_eq!(init.bias, 0.0);
        assert!(ordered_logit_init::<f64>(1).is_err());
    }

    #[test]
    fn init_gives_uniform_probs() {
        for k in 2..=12 {
            let init = ordered_logit_init::<f64>(k).unwrap();
            let f = ordered_logit_probs(init.bias, &init.delta).unwrap();
            for p in f.probs() {
                assert!((p - 1.0 / k as f64).abs() < 1e-12, "K={k}: {p}");
            }
        }
    }

    #[test]
    fn one_hot_nll_zero_and_clamp() {
        let f = CategoricalForecast::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(ordered_logit_nll(&f, RankLabel::from_index(2)), 0.0);
        let nll = ordered_logit_nll(&f, RankLabel::from_index(1));
        assert!((nll - 1e12f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn sample_grad_matches_central_differences() {
        let delta = [0.2, -0.5, 0.1];
        let h = 1e-6;
        for c in 1..=5 {
            let y = RankLabel::from_index(c);
            let s = 0.4;
            let g = ordered_logit_sample_grad(s, &delta, y).unwrap();
            let nll = |s: f64, d: &[f64]| ordered_logit_nll(&ordered_logit_probs(s, d).unwrap(), y);
            let fd = (nll(s + h, &delta) - nll(s - h, &delta)) / (2.0 * h);
            assert!((fd - g.d_score).abs() < 1e-7, "class {c} score");
            for m in 0..delta.len() {
                let mut up = delta;
                let mut dn = delta;
                up[m] += h;
                dn[m] -= h;
                let fd = (nll(s, &up) - nll(s, &dn)) / (2.0 * h);
                assert!((fd - g.d_delta[m]).abs() < 1e-7, "class {c} delta {m}");
            }
        }
    }

    #[test]
    fn non_finite_rejected() {
        assert!(ordered_logit_probs(f64::NAN, &[0.0]).is_err());
        assert!(ordered_logit_probs(0.0, &[f64::INFINITY]).is_err());
    }
}
