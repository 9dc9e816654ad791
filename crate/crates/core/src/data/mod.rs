//! Synthetic generation and file ingestion.

mod io;
mod synthetic;

pub use io::{
    dataset_to_csv, dataset_to_jsonl, load_dataset, load_predictions, parse_dataset_csv, parse_dataset_jsonl,
    parse_predictions, save_dataset, DatasetFormat, PredictionRecord, PredictionSet,
};
pub use synthetic::{generate, quantile_thresholds, split_dataset, Generated, SyntheticSpec};
