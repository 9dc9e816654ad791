//! Synthetic ordinal data from a latent logistic utility.
//!
//! `y* = w.x + eps` with standard-normal features and standard-logistic noise;
//! the observed level is `1 + #{thresholds < y*}`. Class imbalance can be
//! imposed by placing the thresholds at empirical quantiles of `y*`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::OrdinalDataset;
use crate::error::{Error, Result};
use crate::label::{NumLevels, RankLabel};
use crate::nn::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub num_samples: usize,
    pub feature_dim: usize,
    /// Latent weights; drawn standard normal from `seed` when absent.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    /// `K - 1` strictly increasing cutpoints. Replaced when `proportions` is set.
    #[serde(default)]
    pub thresholds: Vec<f64>,
    /// Target class frequencies; cutpoints go to the matching empirical quantiles.
    #[serde(default)]
    pub proportions: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub display_offset: i64,
}

/// Generated data with the parameters that produced it.
#[derive(Debug, Clone)]
pub struct Generated {
    pub dataset: OrdinalDataset<f64>,
    pub weights: Vec<f64>,
    pub thresholds: Vec<f64>,
}

impl SyntheticSpec {
    pub fn levels(&self) -> Result<NumLevels> {
        match &self.proportions {
            Some(p) => NumLevels::new(p.len()),
            None => NumLevels::new(self.thresholds.len() + 1),
        }
    }

    pub fn validate(&self) -> Result<NumLevels> {
        if self.num_samples == 0 || self.feature_dim == 0 {
            return Err(Error::domain("num_samples and feature_dim must be positive"));
        }
        let levels = self.levels()?;
        if let Some(w) = &self.weights {
            if w.len() != self.feature_dim {
                return Err(Error::domain(format!(
                    "{} weights for {} features",
                    w.len(),
                    self.feature_dim
                )));
            }
            if w.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain("non-finite latent weight"));
            }
        }
        match &self.proportions {
            Some(p) => {
                if p.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
                    return Err(Error::domain("class proportions must be positive"));
                }
                let total: f64 = p.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::domain(format!(
                        "class proportions sum to {total}, expected 1"
                    )));
                }
                if !self.thresholds.is_empty() && self.thresholds.len() != p.len() - 1 {
                    return Err(Error::domain("thresholds and proportions disagree on K"));
                }
            }
            None => check_increasing(&self.thresholds)?,
        }
        Ok(levels)
    }
}

fn check_increasing(thresholds: &[f64]) -> Result<()> {
    if thresholds.iter().any(|t| !t.is_finite()) {
        return Err(Error::domain("non-finite threshold"));
    }
    if let Some(w) = thresholds.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::domain(format!(
            "thresholds must be strictly increasing, found {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Standard logistic draw by inverse cdf.
fn logistic<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return (u / (1.0 - u)).ln();
        }
    }
}

/// Cutpoints halfway between order statistics so that class `k` receives
/// `round(cumulative_k * N)` samples below it.
pub fn quantile_thresholds(latent: &[f64], proportions: &[f64]) -> Result<Vec<f64>> {
    let mut sorted = latent.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut cum = 0.0;
    let mut out = Vec::with_capacity(proportions.len().saturating_sub(1));
    for p in &proportions[..proportions.len() - 1] {
        cum += p;
        let m = ((cum * n as f64).round() as usize).clamp(1, n - 1);
        out.push(0.5 * (sorted[m - 1] + sorted[m]));
    }
    check_increasing(&out)
        .map_err(|_| Error::domain("too few samples to realise the requested class proportions"))?;
    Ok(out)
}

pub fn generate(spec: &SyntheticSpec) -> Result<Generated> {
    let levels = spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let weights = match &spec.weights {
        Some(w) => w.clone(),
        None => (0..spec.feature_dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect(),
    };
    let d = spec.feature_dim;
    let mut features = Vec::with_capacity(spec.num_samples * d);
    let mut latent = Vec::with_capacity(spec.num_samples);
    for _ in 0..spec.num_samples {
        let mut score = 0.0;
        for w in &weights {
            let x: f64 = rng.sample(StandardNormal);
            features.push(x);
            score += w * x;
        }
        latent.push(score + logistic(&mut rng));
    }
    let thresholds = match &spec.proportions {
        Some(p) => quantile_thresholds(&latent, p)?,
        None => spec.thresholds.clone(),
    };
    let labels = latent
        .iter()
        .map(|&y| RankLabel::from_index(1 + thresholds.iter().filter(|&&t| t < y).count()))
        .collect();
    let features = Matrix::from_vec(spec.num_samples, d, features)?;
    let dataset = OrdinalDataset::new(features, labels, levels)?.with_display_offset(spec.display_offset);
    Ok(Generated {
        dataset,
        weights,
        thresholds,
    })
}

/// Seeded disjoint split by fractions; the last part takes the rounding remainder.
pub fn split_dataset(
    data: &OrdinalDataset<f64>,
    fractions: &[f64],
    seed: u64,
) -> Result<Vec<OrdinalDataset<f64>>> {
    if fractions.is_empty() || fractions.iter().any(|&f| !(f.is_finite() && f > 0.0)) {
        return Err(Error::domain("split fractions must be positive"));
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!(
            "split fractions sum to {total}, expected 1"
        )));
    }
    let n = data.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(3);
    rand::seq::SliceRandom::shuffle(idx.as_mut_slice(), &mut rng);
    let mut parts = Vec::with_capacity(fractions.len());
    let mut start = 0;
    for (i, f) in fractions.iter().enumerate() {
        let end = if i + 1 == fractions.len() {
            n
        } else {
            (start + (f * n as f64).round() as usize).min(n)
        };
        if end <= start {
            return Err(Error::domain(format!("split {} would be empty", i + 1)));
        }
        let mut part = idx[start..end].to_vec();
        part.sort_unstable();
        parts.push(data.subset(&part)?);
        start = end;
    }
    Ok(parts)
}
