use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ordinal-bench"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn synthetic_config(dir: &Path, n: usize, proportions: &str, heads: &str, extra: &str) -> PathBuf {
    let text = format!(
        r#"
[dataset]
split = [0.7, 0.1, 0.2]

[dataset.synthetic]
num_samples = {n}
feature_dim = 4
weights = [1.5, -1.0, 0.8, 0.5]
proportions = {proportions}
seed = 3

[nn]
epochs = 5
hidden_sizes = [16]

[benchmark]
heads = {heads}
num_seeds = 5
{extra}
"#
    );
    write(dir, "config.toml", &text)
}

fn csv_value(csv: &str, head: &str, metric: &str) -> (f64, String) {
    let line = csv
        .lines()
        .find(|l| l.starts_with(&format!("{head},{metric},")))
        .unwrap_or_else(|| panic!("no {head}/{metric} row in\n{csv}"));
    let cols: Vec<&str> = line.split(',').collect();
    (cols[2].parse().unwrap(), cols[3].to_string())
}

fn count_rows(path: &Path) -> usize {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| l.contains("\"features\""))
        .count()
}

#[test]
fn generate_writes_splits_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synthetic_config(dir.path(), 10_000, "[0.25, 0.62, 0.13]", "[\"majority\"]", "");
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        out_a.to_str().unwrap(),
        "generate",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("level,count,fraction"), "{text}");
    assert!(text.contains("2,6200,0.6200"), "{text}");
    assert_eq!(
        [
            count_rows(&out_a.join("train.jsonl")),
            count_rows(&out_a.join("validation.jsonl")),
            count_rows(&out_a.join("test.jsonl"))
        ],
        [7000, 1000, 2000]
    );
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        out_b.to_str().unwrap(),
        "generate",
    ]);
    assert!(o.status.success());
    for name in ["train.jsonl", "validation.jsonl", "test.jsonl"] {
        assert_eq!(
            std::fs::read(out_a.join(name)).unwrap(),
            std::fs::read(out_b.join(name)).unwrap()
        );
    }
}

#[test]
fn train_majority_and_ordered_logit_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synthetic_config(dir.path(), 3000, "[0.25, 0.62, 0.13]", "[\"majority\"]", "");
    let data = dir.path().join("data");
    assert!(run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        data.to_str().unwrap(),
        "generate"
    ])
    .status
    .success());
    let file_cfg = write(
        dir.path(),
        "files.toml",
        "[dataset]\ntrain = \"data/train.jsonl\"\nvalidation = \"data/validation.jsonl\"\ntest = \"data/test.jsonl\"\n\n[nn]\nepochs = 15\nhidden_sizes = [16]\n\n[head]\nkind = \"ordered_logit\"\n",
    );
    let out = dir.path().join("out");
    let args = [
        "--config",
        file_cfg.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "train",
    ];
    let o = run(&[&args[..], &["--head", "majority"]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("balanced_drps=0.6666666666666666"),
        "{}",
        stdout(&o)
    );
    assert!(!out.join("majority_seed0.checkpoint.json").exists());

    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let bal: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("balanced_drps="))
        .unwrap()
        .parse()
        .unwrap();
    // Majority scores 2/3 here and Random about 8/9.
    assert!(bal < 2.0 / 3.0, "{text}");
    assert!(out.join("ordered_logit_seed0.checkpoint.json").exists());
    assert!(out.join("ordered_logit_seed0.metrics.txt").exists());
}

#[test]
fn missing_dataset_exits_two_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[dataset]\ntrain = \"/no/such/train.jsonl\"\ntest = \"/no/such/test.jsonl\"\n[head]\nkind = \"coral\"\n",
    );
    let o = run(&["--config", cfg.to_str().unwrap(), "train"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/train.jsonl"), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_head = synthetic_config(dir.path(), 100, "[0.5, 0.5]", "[\"lstm\"]", "");
    assert_eq!(
        run(&["--config", bad_head.to_str().unwrap(), "benchmark"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["benchmark"]).status.code(), Some(2));
    assert_eq!(
        run(&["--config", "/no/such/config.toml", "benchmark"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn divergence_exits_nonzero_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = [(1e200, 1), (-1e200, 2), (2e200, 3), (5e199, 1)]
        .iter()
        .map(|(x, y)| format!("{{\"features\":[{x:e}],\"label\":{y}}}\n"))
        .collect();
    write(dir.path(), "train.jsonl", &format!("{{\"levels\":3}}\n{rows}"));
    write(dir.path(), "test.jsonl", &format!("{{\"levels\":3}}\n{rows}"));
    let cfg = write(
        dir.path(),
        "c.toml",
        "[dataset]\ntrain = \"train.jsonl\"\ntest = \"test.jsonl\"\n[nn]\nhidden_sizes = []\nbatch_size = 2\nvalidation_fraction = 0.0\n[head]\nkind = \"regression\"\n",
    );
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
        "train",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("epoch 1, batch 1"), "{}", stderr(&o));
}

#[test]
fn baseline_benchmark_matches_expectations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synthetic_config(
        dir.path(),
        20_000,
        "[0.3, 0.4, 0.3]",
        "[\"random\", \"majority\", \"regression\"]",
        "jobs = 2",
    );
    let out = dir.path().join("report");
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "benchmark",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    let (random, random_std) = csv_value(&csv, "random", "balanced_drps");
    let (majority, _) = csv_value(&csv, "majority", "balanced_drps");
    assert!((random - 8.0 / 9.0).abs() < 0.03, "{random}");
    assert!((majority - 2.0 / 3.0).abs() < 1e-12, "{majority}");
    assert!(!random_std.is_empty());
    for head in ["random", "majority", "regression"] {
        assert_eq!(
            csv_value(&csv, head, "balanced_drps"),
            csv_value(&csv, head, "balanced_drps_degenerate"),
            "{head}"
        );
        assert!(out.join(format!("confusion_{head}.csv")).exists());
    }
    let table = std::fs::read_to_string(out.join("report.txt")).unwrap();
    let row = table.lines().find(|l| l.contains("Majority")).unwrap();
    assert!(
        row.starts_with("| Label") && row.contains("| 0.667 ± 0.000 |"),
        "{table}"
    );
    assert_eq!(stdout(&o), table);
}

#[test]
fn single_seed_leaves_std_blank() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synthetic_config(
        dir.path(),
        500,
        "[0.3, 0.4, 0.3]",
        "[\"majority\"]",
        "seeds = [42]",
    );
    let out = dir.path().join("r");
    assert!(run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "benchmark"
    ])
    .status
    .success());
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(csv_value(&csv, "majority", "rmse").1, "");
}

#[test]
fn evaluate_and_confusion() {
    let dir = tempfile::tempdir().unwrap();
    let perfect = write(
        dir.path(),
        "p.jsonl",
        "{\"label\":1,\"truth\":1}\n{\"label\":3,\"truth\":3}\n",
    );
    let o = run(&["--levels", "3", "evaluate", perfect.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for key in [
        "drps=0\n",
        "balanced_drps=0\n",
        "rmse=0\n",
        "accuracy=1\n",
        "absent_classes=2\n",
    ] {
        assert!(text.contains(key), "{key:?} missing from\n{text}");
    }

    let probs = write(
        dir.path(),
        "q.jsonl",
        "{\"probs\":[0.6,0.3,0.1],\"truth\":2}\n{\"probs\":[0.1,0.2,0.7],\"truth\":3}\n",
    );
    let o = run(&["confusion", probs.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "true\\pred,1,2,3\n1,0.000000,0.000000,0.000000\n2,1.000000,0.000000,0.000000\n3,0.000000,0.000000,1.000000\n"
    );
    let o = run(&["confusion", "--counts", probs.to_str().unwrap()]);
    assert!(
        stdout(&o).starts_with("true\\pred,1,2,3\n1,0,0,0\n2,1,0,0\n"),
        "{}",
        stdout(&o)
    );

    let bad = write(
        dir.path(),
        "bad.jsonl",
        "{\"label\":1,\"truth\":1}\n{\"probs\":[0.5,0.3],\"truth\":1}\n",
    );
    let o = run(&["--levels", "3", "evaluate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":2:"), "{}", stderr(&o));
}
