use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::runner::RunOutcome;
use crate::error::{Error, Result};
use crate::heads::HeadKind;
use crate::metrics::{Metric, NormalizedConfusion};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub dataset_fingerprint: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation; absent for a single run.
    pub std: Option<f64>,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = (values.len() >= 2).then(|| {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1.0)).sqrt()
        });
        Summary { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadSummary {
    pub head: HeadKind,
    pub runs: usize,
    /// In `Metric::ALL` order.
    pub metrics: Vec<(Metric, Summary)>,
    pub confusion: NormalizedConfusion,
}

impl HeadSummary {
    pub fn get(&self, metric: Metric) -> Summary {
        self.metrics
            .iter()
            .find(|(m, _)| *m == metric)
            .map(|(_, s)| *s)
            .expect("every metric is summarized")
    }
}

/// Aggregated benchmark results.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub heads: Vec<HeadSummary>,
    pub provenance: Provenance,
    pub runs: Vec<RunOutcome>,
}

impl RunReport {
    /// Group runs by head in the order of `heads`.
    pub fn from_runs(heads: &[HeadKind], runs: &[RunOutcome], provenance: Provenance) -> Result<Self> {
        let mut summaries = Vec::with_capacity(heads.len());
        for &head in heads {
            let mine: Vec<&RunOutcome> = runs.iter().filter(|r| r.head == head).collect();
            if mine.is_empty() {
                return Err(Error::domain(format!("no runs for head {head}")));
            }
            let metrics = Metric::ALL
                .iter()
                .map(|&m| {
                    (
                        m,
                        Summary::of(&mine.iter().map(|r| r.report.get(m)).collect::<Vec<_>>()),
                    )
                })
                .collect();
            let matrices: Vec<NormalizedConfusion> =
                mine.iter().map(|r| r.report.confusion.normalized()).collect();
            summaries.push(HeadSummary {
                head,
                runs: mine.len(),
                metrics,
                confusion: NormalizedConfusion::mean(&matrices)?,
            });
        }
        Ok(RunReport {
            heads: summaries,
            provenance,
            runs: runs.to_vec(),
        })
    }

    pub fn head(&self, kind: HeadKind) -> Option<&HeadSummary> {
        self.heads.iter().find(|h| h.head == kind)
    }

    /// `head,metric,mean,std` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("head,metric,mean,std\n");
        for h in &self.heads {
            for (m, s) in &h.metrics {
                let std = s.std.map(|v| v.to_string()).unwrap_or_default();
                let _ = writeln!(out, "{},{},{},{}", h.head.name(), m.name(), s.mean, std);
            }
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut table = render_table(&self.to_csv()).expect("own CSV parses");
        let p = &self.provenance;
        let seeds: Vec<String> = p.seeds.iter().map(u64::to_string).collect();
        let _ = writeln!(table);
        let _ = writeln!(table, "config sha256:  {}", p.config_hash);
        let _ = writeln!(table, "dataset sha256: {}", p.dataset_fingerprint);
        let _ = writeln!(table, "seeds: {}", seeds.join(","));
        table
    }

    /// Write `report.csv`, `report.txt` and one `confusion_<head>.csv` per head.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let put = |name: String, text: String| {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
        };
        put("report.csv".into(), self.to_csv())?;
        put("report.txt".into(), self.to_table())?;
        for h in &self.heads {
            put(format!("confusion_{}.csv", h.head.name()), h.confusion.to_csv())?;
        }
        Ok(())
    }
}

const TABLE_COLUMNS: [(Metric, &str); 4] = [
    (Metric::BalancedDrps, "Bal. DRPS ↓"),
    (Metric::BalancedDrpsDegenerate, "Bal. DRPS (degenerate) ↓"),
    (Metric::Rmse, "RMSE ↓"),
    (Metric::Accuracy, "Acc. ↑"),
];

fn cell(mean: f64, std: Option<f64>) -> String {
    match std {
        Some(s) => format!("{mean:.3} ± {s:.3}"),
        None => format!("{mean:.3}"),
    }
}

/// Text table rendered from `report.csv` contents.
pub fn render_table(csv_text: &str) -> Result<String> {
    let mut reader = csv::ReaderBuilder::new().from_reader(csv_text.as_bytes());
    let mut rows: Vec<(HeadKind, Vec<Option<String>>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Config(format!("report CSV: {e}")))?;
        let bad = || Error::Config(format!("report CSV: bad row {record:?}"));
        let head: HeadKind = record.get(0).ok_or_else(bad)?.parse()?;
        let metric = Metric::from_name(record.get(1).ok_or_else(bad)?).ok_or_else(bad)?;
        let mean: f64 = record.get(2).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let std = match record.get(3) {
            Some("") | None => None,
            Some(v) => Some(v.parse::<f64>().map_err(|_| bad())?),
        };
        if rows.last().is_none_or(|(h, _)| *h != head) {
            rows.push((head, vec![None; TABLE_COLUMNS.len()]));
        }
        if let Some(col) = TABLE_COLUMNS.iter().position(|(m, _)| *m == metric) {
            rows.last_mut().expect("pushed").1[col] = Some(cell(mean, std));
        }
    }
    let header: Vec<&str> = ["Output type", "Model"]
        .into_iter()
        .chain(TABLE_COLUMNS.iter().map(|(_, t)| *t))
        .collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(head, cells)| {
            let kind = if head.is_label_only() {
                "Label"
            } else {
                "Distribution"
            };
            [kind.to_string(), head.display_name().to_string()]
                .into_iter()
                .chain(cells.iter().map(|c| c.clone().unwrap_or_else(|| "-".into())))
                .collect()
        })
        .collect();
    let width = |i: usize| {
        body.iter()
            .map(|r| r[i].chars().count())
            .chain(std::iter::once(header[i].chars().count()))
            .max()
            .unwrap_or(0)
    };
    let widths: Vec<usize> = (0..header.len()).map(width).collect();
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(header.clone());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&line(rule.iter().map(String::as_str).collect()));
    for r in &body {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    Ok(out)
}
