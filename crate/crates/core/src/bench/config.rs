use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{generate, load_dataset, split_dataset, DatasetFormat, SyntheticSpec};
use crate::dataset::OrdinalDataset;
use crate::error::{Error, Result};
use crate::heads::{HeadKind, HeadOptions};
use crate::label::NumLevels;
use crate::train::TrainConfig;

/// Where the data comes from: files, or a synthetic spec split by fractions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSection {
    pub train: Option<PathBuf>,
    pub validation: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub format: Option<DatasetFormat>,
    pub levels: Option<usize>,
    pub synthetic: Option<SyntheticSpec>,
    /// Train / validation / test fractions (two entries for train / test).
    pub split: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeadSection {
    pub kind: Option<HeadKind>,
    pub isotonic: bool,
    pub lr_multiplier: f64,
}

impl Default for HeadSection {
    fn default() -> Self {
        let d = HeadOptions::default();
        HeadSection {
            kind: None,
            isotonic: d.isotonic,
            lr_multiplier: d.lr_multiplier,
        }
    }
}

impl HeadSection {
    pub fn options(&self) -> HeadOptions {
        HeadOptions {
            isotonic: self.isotonic,
            lr_multiplier: self.lr_multiplier,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkSection {
    /// Defaults to every head kind.
    pub heads: Vec<HeadKind>,
    /// Explicit seeds; otherwise `num_seeds` consecutive seeds from `base_seed`.
    pub seeds: Option<Vec<u64>>,
    pub base_seed: u64,
    pub num_seeds: usize,
    pub jobs: usize,
}

impl Default for BenchmarkSection {
    fn default() -> Self {
        BenchmarkSection {
            heads: HeadKind::ALL.to_vec(),
            seeds: None,
            base_seed: 0,
            num_seeds: 5,
            jobs: 1,
        }
    }
}

impl BenchmarkSection {
    pub fn seed_list(&self) -> Vec<u64> {
        match &self.seeds {
            Some(s) => s.clone(),
            None => (0..self.num_seeds as u64).map(|i| self.base_seed + i).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub dataset: DatasetSection,
    pub nn: TrainConfig,
    pub head: HeadSection,
    pub benchmark: BenchmarkSection,
}

/// Loaded splits. `validation` falls back to a holdout of `train` during training.
#[derive(Debug, Clone)]
pub struct Splits {
    pub train: OrdinalDataset<f64>,
    pub validation: Option<OrdinalDataset<f64>>,
    pub test: OrdinalDataset<f64>,
}

impl Splits {
    pub fn levels(&self) -> NumLevels {
        self.train.num_levels()
    }

    /// SHA-256 over the JSONL encoding of every split.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (name, part) in [
            ("train", Some(&self.train)),
            ("validation", self.validation.as_ref()),
            ("test", Some(&self.test)),
        ] {
            hasher.update(name.as_bytes());
            if let Some(p) = part {
                hasher.update(crate::data::dataset_to_jsonl(p).as_bytes());
            }
        }
        hex(&hasher.finalize())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub const DEFAULT_SPLIT: [f64; 3] = [0.7, 0.1, 0.2];

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: BenchConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.nn.validate()?;
        let b = &self.benchmark;
        if b.heads.is_empty() {
            return Err(Error::Config("benchmark.heads is empty".into()));
        }
        for (i, h) in b.heads.iter().enumerate() {
            if b.heads[..i].contains(h) {
                return Err(Error::Config(format!("head {h} listed twice")));
            }
        }
        let seeds = b.seed_list();
        if seeds.is_empty() {
            return Err(Error::Config("no seeds configured".into()));
        }
        for (i, s) in seeds.iter().enumerate() {
            if seeds[..i].contains(s) {
                return Err(Error::Config(format!("seed {s} listed twice")));
            }
        }
        if b.jobs == 0 {
            return Err(Error::Config("benchmark.jobs must be at least 1".into()));
        }
        if !(self.head.lr_multiplier.is_finite() && self.head.lr_multiplier > 0.0) {
            return Err(Error::Config("head.lr_multiplier must be positive".into()));
        }
        let d = &self.dataset;
        match (&d.synthetic, &d.train) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "dataset: give either files or a synthetic spec, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config(
                    "dataset: need dataset.train/test files or dataset.synthetic".into(),
                ))
            }
            (None, Some(_)) if d.test.is_none() => {
                return Err(Error::Config("dataset.test is required".into()))
            }
            _ => {}
        }
        if let Some(split) = &d.split {
            if !(2..=3).contains(&split.len()) {
                return Err(Error::Config("dataset.split needs 2 or 3 fractions".into()));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical TOML encoding, after overrides. `jobs` is left
    /// out since results do not depend on it.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.benchmark.jobs = 1;
        hex(&Sha256::digest(canonical.to_toml().as_bytes()))
    }

    pub fn levels_override(&self) -> Result<Option<NumLevels>> {
        self.dataset.levels.map(NumLevels::new).transpose()
    }

    /// Load or generate the splits. Relative file paths resolve against `base`.
    pub fn load_splits(&self, base: &Path) -> Result<Splits> {
        let d = &self.dataset;
        let levels = self.levels_override()?;
        if let Some(spec) = &d.synthetic {
            let data = generate(spec)?.dataset;
            if let Some(k) = levels {
                if k != data.num_levels() {
                    return Err(Error::Config(format!(
                        "dataset.levels = {k} but the synthetic spec has {} levels",
                        data.num_levels()
                    )));
                }
            }
            let fractions = d.split.clone().unwrap_or_else(|| DEFAULT_SPLIT.to_vec());
            let mut parts = split_dataset(&data, &fractions, spec.seed)?.into_iter();
            let train = parts.next().expect("split has parts");
            let (validation, test) = if fractions.len() == 3 {
                (parts.next(), parts.next().expect("three parts"))
            } else {
                (None, parts.next().expect("two parts"))
            };
            return Ok(Splits {
                train,
                validation,
                test,
            });
        }
        let load = |p: &PathBuf| {
            let path = if p.is_absolute() { p.clone() } else { base.join(p) };
            load_dataset(&path, d.format, levels)
        };
        let train = load(d.train.as_ref().expect("validated"))?;
        let test = load(d.test.as_ref().expect("validated"))?;
        let validation = d.validation.as_ref().map(load).transpose()?;
        for part in std::iter::once(&test).chain(validation.as_ref()) {
            if part.num_levels() != train.num_levels() || part.dim() != train.dim() {
                return Err(Error::Config(format!(
                    "splits disagree: train has K={} d={}, another split K={} d={}",
                    train.num_levels(),
                    train.dim(),
                    part.num_levels(),
                    part.dim()
                )));
            }
        }
        Ok(Splits {
            train,
            validation,
            test,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYNTH: &str = r#"
[dataset.synthetic]
num_samples = 200
feature_dim = 3
thresholds = [-1.0, 1.0]
seed = 4

[nn]
epochs = 2

[benchmark]
heads = ["majority", "coral"]
"#;

    #[test]
    fn parses_and_defaults() {
        let c = BenchConfig::from_toml(SYNTH).unwrap();
        assert_eq!(c.benchmark.seed_list(), vec![0, 1, 2, 3, 4]);
        assert_eq!(c.nn.batch_size, 64);
        assert_eq!(c.head.lr_multiplier, 100.0);
        let s = c.load_splits(Path::new(".")).unwrap();
        assert_eq!(
            (s.train.len(), s.validation.as_ref().unwrap().len(), s.test.len()),
            (140, 20, 40)
        );
    }

    #[test]
    fn rejects_unknown_keys_and_heads() {
        assert!(matches!(
            BenchConfig::from_toml("[nn]\nepochz = 3\n"),
            Err(Error::Config(_))
        ));
        let bad = SYNTH.replace("\"coral\"", "\"coral2\"");
        assert!(matches!(BenchConfig::from_toml(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn hash_tracks_content() {
        let a = BenchConfig::from_toml(SYNTH).unwrap();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.benchmark.jobs = 8;
        assert_eq!(a.hash(), b.hash());
        b.nn.seed = 9;
        assert_ne!(a.hash(), b.hash());
        let back = BenchConfig::from_toml(&a.to_toml()).unwrap();
        assert_eq!(back, a);
    }
}
