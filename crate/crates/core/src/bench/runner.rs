use rayon::prelude::*;

use super::config::{BenchConfig, Splits};
use super::report::{Provenance, RunReport};
use crate::error::{Error, Result};
use crate::forecast::{degenerate_forecast, CumulativeForecast};
use crate::heads::{baseline_predict, HeadKind, HeadOptions};
use crate::metrics::{evaluate, MetricReport, DEFAULT_ADJACENT_WITHIN};
use crate::model::Model;
use crate::train::{train, TrainConfig};

/// Result of one head trained (or fitted) with one seed, scored on the test split.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub head: HeadKind,
    pub seed: u64,
    pub report: MetricReport,
    /// `None` for the label-only baselines.
    pub model: Option<Model<f64>>,
}

/// Fit `kind` with `seed` and score it on `splits.test`.
pub fn run_single(
    kind: HeadKind,
    seed: u64,
    splits: &Splits,
    nn: &TrainConfig,
    options: HeadOptions,
) -> Result<RunOutcome> {
    let test = &splits.test;
    if kind.is_baseline() {
        let decoded = baseline_predict(kind, splits.train.labels(), splits.levels(), test.len(), seed)?;
        let forecasts = decoded
            .iter()
            .map(|&l| degenerate_forecast::<f64>(l, splits.levels()).map(CumulativeForecast::from))
            .collect::<Result<Vec<_>>>()?;
        let report = evaluate(&forecasts, &decoded, test.labels(), DEFAULT_ADJACENT_WITHIN)?;
        return Ok(RunOutcome {
            head: kind,
            seed,
            report,
            model: None,
        });
    }
    let config = TrainConfig { seed, ..nn.clone() };
    let outcome = train(kind, &splits.train, splits.validation.as_ref(), &config, options)?;
    let report = outcome.model.evaluate(test)?;
    Ok(RunOutcome {
        head: kind,
        seed,
        report,
        model: Some(outcome.model),
    })
}

/// Every configured head x seed, run on up to `benchmark.jobs` threads.
pub fn run_benchmark(config: &BenchConfig, splits: &Splits) -> Result<RunReport> {
    config.validate()?;
    let heads = &config.benchmark.heads;
    let seeds = config.benchmark.seed_list();
    let tasks: Vec<(usize, HeadKind, u64)> = heads
        .iter()
        .enumerate()
        .flat_map(|(i, &h)| seeds.iter().map(move |&s| (i, h, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.benchmark.jobs)
        .build()
        .map_err(|e| {
            Error::Config(format!(
                "cannot start {} worker threads: {e}",
                config.benchmark.jobs
            ))
        })?;
    let options = config.head.options();
    let mut results: Vec<(usize, u64, Result<RunOutcome>)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, h, s)| (i, s, run_single(h, s, splits, &config.nn, options)))
            .collect()
    });
    results.sort_by_key(|(i, s, _)| (*i, *s));
    let mut runs = Vec::with_capacity(results.len());
    for (i, seed, r) in results {
        match r {
            Ok(mut run) => {
                run.model = None;
                runs.push(run);
            }
            Err(e) => {
                return Err(Error::Run {
                    head: heads[i].name().to_string(),
                    seed,
                    source: Box::new(e),
                })
            }
        }
    }
    let provenance = Provenance {
        config_hash: config.hash(),
        seeds,
        dataset_fingerprint: splits.fingerprint(),
    };
    RunReport::from_runs(heads, &runs, provenance)
}
