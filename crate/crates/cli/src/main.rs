use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ordinal_core::bench::{run_benchmark, run_single, BenchConfig, DEFAULT_SPLIT};
use ordinal_core::data::{generate, load_predictions, save_dataset, split_dataset, DatasetFormat};
use ordinal_core::metrics::ConfusionMatrix;
use ordinal_core::{Checkpoint, Error, HeadKind, NumLevels, Result};

#[derive(Parser, Debug)]
#[command(
    name = "ordinal-bench",
    version,
    about = "Train and score ordinal prediction heads"
)]
struct Cli {
    /// TOML config with [dataset], [nn], [head] and [benchmark] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the generator seed, training seed or benchmark base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Parallel head x seed runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Number of ordinal levels, for files that do not declare it.
    #[arg(long, global = true)]
    levels: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write synthetic train/validation/test JSONL splits.
    Generate,
    /// Train one head for one seed; writes a checkpoint and test metrics.
    Train {
        /// Head kind; defaults to `head.kind` from the config.
        #[arg(long)]
        head: Option<HeadKind>,
    },
    /// Every configured head over every seed; writes report.csv, report.txt and confusion CSVs.
    Benchmark,
    /// Score a JSONL prediction file.
    Evaluate { predictions: PathBuf },
    /// Confusion matrix of a JSONL prediction file.
    Confusion {
        predictions: PathBuf,
        /// Raw counts instead of row-normalized frequencies.
        #[arg(long)]
        counts: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_user_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let levels = cli.levels.map(NumLevels::new).transpose()?;
    match &cli.command {
        Command::Generate => cmd_generate(cli),
        Command::Train { head } => cmd_train(cli, *head),
        Command::Benchmark => cmd_benchmark(cli),
        Command::Evaluate { predictions } => {
            let set = load_predictions(predictions, levels)?;
            print!("{}", set.evaluate()?.to_key_value());
            Ok(())
        }
        Command::Confusion { predictions, counts } => {
            let set = load_predictions(predictions, levels)?;
            let m = ConfusionMatrix::from_predictions(&set.decoded(), &set.truths(), set.levels)?;
            if *counts {
                print!("{}", m.to_csv());
            } else {
                print!("{}", m.normalized().to_csv());
            }
            Ok(())
        }
    }
}

/// Config with command-line overrides applied, plus the directory relative paths resolve against.
fn load_config(cli: &Cli) -> Result<(BenchConfig, PathBuf)> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("this command needs --config".into()))?;
    let mut config = BenchConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.nn.seed = seed;
        config.benchmark.base_seed = seed;
        if let Some(s) = &config.benchmark.seeds {
            config.benchmark.num_seeds = s.len();
            config.benchmark.seeds = None;
        }
        if let Some(spec) = &mut config.dataset.synthetic {
            spec.seed = seed;
        }
    }
    if let Some(jobs) = cli.jobs {
        config.benchmark.jobs = jobs;
    }
    if cli.levels.is_some() {
        config.dataset.levels = cli.levels;
    }
    config.validate()?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((config, base))
}

fn create_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn cmd_generate(cli: &Cli) -> Result<()> {
    let (config, _) = load_config(cli)?;
    let spec = config
        .dataset
        .synthetic
        .as_ref()
        .ok_or_else(|| Error::Config("generate needs a [dataset.synthetic] section".into()))?;
    let data = generate(spec)?.dataset;
    let fractions = config
        .dataset
        .split
        .clone()
        .unwrap_or_else(|| DEFAULT_SPLIT.to_vec());
    let parts = split_dataset(&data, &fractions, spec.seed)?;
    let names: &[&str] = if parts.len() == 3 {
        &["train", "validation", "test"]
    } else {
        &["train", "test"]
    };
    create_out_dir(&cli.out_dir)?;
    for (name, part) in names.iter().zip(&parts) {
        let path = cli.out_dir.join(format!("{name}.jsonl"));
        save_dataset(part, &path, DatasetFormat::Jsonl)?;
        println!("{}: {} rows", path.display(), part.len());
    }
    println!("level,count,fraction");
    let n = data.len() as f64;
    let counts = data.class_counts();
    for label in data.num_levels().labels() {
        let c = counts.get(&label).copied().unwrap_or(0);
        println!(
            "{},{},{:.4}",
            label.index() as i64 + data.display_offset(),
            c,
            c as f64 / n
        );
    }
    Ok(())
}

fn cmd_train(cli: &Cli, head: Option<HeadKind>) -> Result<()> {
    let (config, base) = load_config(cli)?;
    let kind = head
        .or(config.head.kind)
        .ok_or_else(|| Error::Config("no head given; pass --head or set head.kind".into()))?;
    let splits = config.load_splits(&base)?;
    let run = run_single(kind, config.nn.seed, &splits, &config.nn, config.head.options())?;
    create_out_dir(&cli.out_dir)?;
    let stem = format!("{}_seed{}", kind.name(), run.seed);
    if let Some(model) = &run.model {
        let path = cli.out_dir.join(format!("{stem}.checkpoint.json"));
        Checkpoint::from_model(model).save(&path)?;
        println!("checkpoint: {}", path.display());
    }
    let text = run.report.to_key_value();
    let path = cli.out_dir.join(format!("{stem}.metrics.txt"));
    std::fs::write(&path, &text).map_err(|e| Error::Io { path, source: e })?;
    print!("{text}");
    Ok(())
}

fn cmd_benchmark(cli: &Cli) -> Result<()> {
    let (config, base) = load_config(cli)?;
    let splits = config.load_splits(&base)?;
    let report = run_benchmark(&config, &splits)?;
    report.write(&cli.out_dir)?;
    print!("{}", report.to_table());
    Ok(())
}
