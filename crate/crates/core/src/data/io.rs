//! Dataset and prediction files.
//!
//! Dataset JSONL: optional metadata line `{"levels": K, "display_offset": o}`
//! followed by `{"features": [...], "label": y}` rows. Dataset CSV: header
//! `f1,...,fd,label`. Prediction JSONL: `{"probs": [...], "truth": y}` or
//! `{"label": l, "truth": y}` per line, with the same optional metadata line.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dataset::OrdinalDataset;
use crate::error::{Error, Result};
use crate::forecast::{degenerate_forecast, CategoricalForecast, CumulativeForecast};
use crate::label::{NumLevels, RankLabel};
use crate::metrics::{evaluate, MetricReport, DEFAULT_ADJACENT_WITHIN};
use crate::nn::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Jsonl,
    Csv,
}

impl DatasetFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => Ok(DatasetFormat::Jsonl),
            Some("csv") => Ok(DatasetFormat::Csv),
            _ => Err(Error::Config(format!(
                "cannot tell dataset format of {}; use .jsonl or .csv",
                path.display()
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Metadata {
    levels: usize,
    #[serde(default)]
    display_offset: i64,
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Non-blank lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn try_metadata(value: &Value) -> Option<std::result::Result<Metadata, serde_json::Error>> {
    let obj = value.as_object()?;
    obj.contains_key("levels")
        .then(|| serde_json::from_value(value.clone()))
}

fn parse_rank(value: &Value, field: &str, src: &str, line: usize) -> Result<usize> {
    let n = value.as_u64().ok_or_else(|| {
        parse_err(
            src,
            line,
            format!("`{field}` must be a positive integer, got {value}"),
        )
    })?;
    if n == 0 {
        return Err(parse_err(src, line, format!("`{field}` must be >= 1, got 0")));
    }
    Ok(n as usize)
}

fn resolve_levels(declared: Option<usize>, flag: Option<NumLevels>, src: &str) -> Result<NumLevels> {
    match (flag, declared) {
        (Some(k), _) => Ok(k),
        (None, Some(k)) => NumLevels::new(k).map_err(|e| parse_err(src, 1, e.to_string())),
        (None, None) => Err(Error::Config(format!(
            "{src}: number of levels unknown; pass --levels or add a {{\"levels\": K}} first line"
        ))),
    }
}

fn check_label(index: usize, levels: NumLevels, field: &str, src: &str, line: usize) -> Result<RankLabel> {
    RankLabel::new(index, levels)
        .map_err(|_| parse_err(src, line, format!("{field} {index} outside 1..={levels}")))
}

/// Parse dataset JSONL text; `src` names the source in errors.
pub fn parse_dataset_jsonl(text: &str, src: &str, levels: Option<NumLevels>) -> Result<OrdinalDataset<f64>> {
    let mut meta: Option<Metadata> = None;
    let mut rows: Vec<(usize, Vec<f64>, usize)> = Vec::new();
    for (n, line) in lines(text) {
        let value: Value = serde_json::from_str(line).map_err(|e| parse_err(src, n, e.to_string()))?;
        if rows.is_empty() && meta.is_none() {
            if let Some(m) = try_metadata(&value) {
                meta = Some(m.map_err(|e| parse_err(src, n, e.to_string()))?);
                continue;
            }
        }
        let obj = value
            .as_object()
            .ok_or_else(|| parse_err(src, n, "expected a JSON object"))?;
        let features = obj
            .get("features")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err(src, n, "missing `features` array"))?
            .iter()
            .map(|v| {
                v.as_f64()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| parse_err(src, n, format!("feature {v} is not a finite number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let label = obj
            .get("label")
            .ok_or_else(|| parse_err(src, n, "missing `label`"))?;
        rows.push((n, features, parse_rank(label, "label", src, n)?));
    }
    let levels = resolve_levels(meta.as_ref().map(|m| m.levels), levels, src)?;
    let dim = rows
        .first()
        .map(|r| r.1.len())
        .ok_or_else(|| parse_err(src, 1, "no samples"))?;
    let mut data = Vec::with_capacity(rows.len() * dim);
    let mut labels = Vec::with_capacity(rows.len());
    for (n, features, label) in &rows {
        if features.len() != dim || dim == 0 {
            return Err(parse_err(
                src,
                *n,
                format!("{} features, expected {dim}", features.len()),
            ));
        }
        data.extend_from_slice(features);
        labels.push(check_label(*label, levels, "label", src, *n)?);
    }
    let features = Matrix::from_vec(rows.len(), dim, data)?;
    Ok(OrdinalDataset::new(features, labels, levels)?
        .with_display_offset(meta.map_or(0, |m| m.display_offset)))
}

/// Parse dataset CSV text with header `f1..fd,label`.
pub fn parse_dataset_csv(text: &str, src: &str, levels: Option<NumLevels>) -> Result<OrdinalDataset<f64>> {
    let levels = resolve_levels(None, levels, src)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| parse_err(src, 1, e.to_string()))?
        .clone();
    let ncols = headers.len();
    let label_ok = headers.get(ncols.wrapping_sub(1)) == Some("label");
    let features_ok =
        (0..ncols.saturating_sub(1)).all(|i| headers.get(i) == Some(format!("f{}", i + 1).as_str()));
    if ncols < 2 || !label_ok || !features_ok {
        return Err(parse_err(src, 1, "header must be f1,...,fd,label"));
    }
    let dim = ncols - 1;
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(src, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        for i in 0..dim {
            let v: f64 = record[i]
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| {
                    parse_err(
                        src,
                        line,
                        format!("f{} = {:?} is not a finite number", i + 1, &record[i]),
                    )
                })?;
            data.push(v);
        }
        let label: usize = record[dim].parse().map_err(|_| {
            parse_err(
                src,
                line,
                format!("label {:?} is not a positive integer", &record[dim]),
            )
        })?;
        labels.push(check_label(label, levels, "label", src, line)?);
    }
    if labels.is_empty() {
        return Err(parse_err(src, 1, "no samples"));
    }
    let features = Matrix::from_vec(labels.len(), dim, data)?;
    OrdinalDataset::new(features, labels, levels)
}

pub fn load_dataset(
    path: &Path,
    format: Option<DatasetFormat>,
    levels: Option<NumLevels>,
) -> Result<OrdinalDataset<f64>> {
    let format = match format {
        Some(f) => f,
        None => DatasetFormat::from_path(path)?,
    };
    let text = read(path)?;
    let src = path.display().to_string();
    match format {
        DatasetFormat::Jsonl => parse_dataset_jsonl(&text, &src, levels),
        DatasetFormat::Csv => parse_dataset_csv(&text, &src, levels),
    }
}

/// JSONL text with a metadata first line.
pub fn dataset_to_jsonl(data: &OrdinalDataset<f64>) -> String {
    let mut out = String::new();
    let meta = Metadata {
        levels: data.num_levels().get(),
        display_offset: data.display_offset(),
    };
    out.push_str(&serde_json::to_string(&meta).expect("metadata serializes"));
    out.push('\n');
    #[derive(Serialize)]
    struct Row<'a> {
        features: &'a [f64],
        label: usize,
    }
    for (row, label) in data.features().iter_rows().zip(data.labels()) {
        let line = serde_json::to_string(&Row {
            features: row,
            label: label.index(),
        })
        .expect("row serializes");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn dataset_to_csv(data: &OrdinalDataset<f64>) -> String {
    let mut out = String::new();
    for i in 1..=data.dim() {
        let _ = write!(out, "f{i},");
    }
    out.push_str("label\n");
    for (row, label) in data.features().iter_rows().zip(data.labels()) {
        for v in row {
            // Display for f64 is the shortest representation that round-trips
            let _ = write!(out, "{v},");
        }
        let _ = writeln!(out, "{label}");
    }
    out
}

pub fn save_dataset(data: &OrdinalDataset<f64>, path: &Path, format: DatasetFormat) -> Result<()> {
    let text = match format {
        DatasetFormat::Jsonl => dataset_to_jsonl(data),
        DatasetFormat::Csv => dataset_to_csv(data),
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// One externally produced prediction.
#[derive(Debug, Clone, PartialEq)]
pub enum PredictionRecord {
    Forecast {
        probs: CategoricalForecast<f64>,
        truth: RankLabel,
    },
    Label {
        label: RankLabel,
        truth: RankLabel,
    },
}

impl PredictionRecord {
    pub fn truth(&self) -> RankLabel {
        match self {
            PredictionRecord::Forecast { truth, .. } | PredictionRecord::Label { truth, .. } => *truth,
        }
    }

    /// Hard label: the forecast's argmax or the given label.
    pub fn decoded(&self) -> RankLabel {
        match self {
            PredictionRecord::Forecast { probs, .. } => probs.argmax(),
            PredictionRecord::Label { label, .. } => *label,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    pub levels: NumLevels,
    pub records: Vec<PredictionRecord>,
}

impl PredictionSet {
    pub fn truths(&self) -> Vec<RankLabel> {
        self.records.iter().map(PredictionRecord::truth).collect()
    }

    pub fn decoded(&self) -> Vec<RankLabel> {
        self.records.iter().map(PredictionRecord::decoded).collect()
    }

    /// Cumulative forecasts; label records become one-hot.
    pub fn forecasts(&self) -> Vec<CumulativeForecast<f64>> {
        self.records
            .iter()
            .map(|r| match r {
                PredictionRecord::Forecast { probs, .. } => probs.to_cumulative(),
                PredictionRecord::Label { label, .. } => degenerate_forecast(*label, self.levels)
                    .expect("validated on load")
                    .to_cumulative(),
            })
            .collect()
    }

    pub fn evaluate(&self) -> Result<MetricReport> {
        evaluate(
            &self.forecasts(),
            &self.decoded(),
            &self.truths(),
            DEFAULT_ADJACENT_WITHIN,
        )
    }
}

enum RawPrediction {
    Probs(Vec<f64>),
    Label(usize),
}

pub fn parse_predictions(text: &str, src: &str, levels: Option<NumLevels>) -> Result<PredictionSet> {
    let mut meta: Option<Metadata> = None;
    let mut raw: Vec<(usize, RawPrediction, usize)> = Vec::new();
    let mut probs_len: Option<(usize, usize)> = None;
    for (n, line) in lines(text) {
        let value: Value = serde_json::from_str(line).map_err(|e| parse_err(src, n, e.to_string()))?;
        if raw.is_empty() && meta.is_none() {
            if let Some(m) = try_metadata(&value) {
                meta = Some(m.map_err(|e| parse_err(src, n, e.to_string()))?);
                continue;
            }
        }
        let obj = value
            .as_object()
            .ok_or_else(|| parse_err(src, n, "expected a JSON object"))?;
        let truth = obj
            .get("truth")
            .ok_or_else(|| parse_err(src, n, "missing `truth`"))?;
        let truth = parse_rank(truth, "truth", src, n)?;
        let pred = match (obj.get("probs"), obj.get("label")) {
            (Some(_), Some(_)) => return Err(parse_err(src, n, "record has both `probs` and `label`")),
            (None, None) => return Err(parse_err(src, n, "record needs `probs` or `label`")),
            (Some(p), None) => {
                let probs = p
                    .as_array()
                    .ok_or_else(|| parse_err(src, n, "`probs` must be an array"))?
                    .iter()
                    .map(|v| {
                        v.as_f64()
                            .ok_or_else(|| parse_err(src, n, format!("probability {v} is not a number")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                match probs_len {
                    None => probs_len = Some((probs.len(), n)),
                    Some((len, first)) if len != probs.len() => {
                        return Err(parse_err(
                            src,
                            n,
                            format!("{} probabilities, line {first} had {len}", probs.len()),
                        ))
                    }
                    _ => {}
                }
                RawPrediction::Probs(probs)
            }
            (None, Some(l)) => RawPrediction::Label(parse_rank(l, "label", src, n)?),
        };
        raw.push((n, pred, truth));
    }
    if raw.is_empty() {
        return Err(parse_err(src, 1, "no predictions"));
    }
    let declared = meta.map(|m| m.levels).or(probs_len.map(|(len, _)| len));
    let levels = resolve_levels(declared, levels, src)?;
    if let Some((len, line)) = probs_len {
        if len != levels.get() {
            return Err(parse_err(
                src,
                line,
                format!("{len} probabilities but K = {levels}"),
            ));
        }
    }
    let records = raw
        .into_iter()
        .map(|(n, pred, truth)| {
            let truth = check_label(truth, levels, "truth", src, n)?;
            Ok(match pred {
                RawPrediction::Probs(p) => PredictionRecord::Forecast {
                    probs: CategoricalForecast::new(p).map_err(|e| parse_err(src, n, e.to_string()))?,
                    truth,
                },
                RawPrediction::Label(l) => PredictionRecord::Label {
                    label: check_label(l, levels, "label", src, n)?,
                    truth,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PredictionSet { levels, records })
}

pub fn load_predictions(path: &Path, levels: Option<NumLevels>) -> Result<PredictionSet> {
    let text = read(path)?;
    parse_predictions(&text, &path.display().to_string(), levels)
}
