//! Multi-seed benchmark harness: config, parallel runs, and report files.

mod config;
mod report;
mod runner;

pub use config::{BenchConfig, BenchmarkSection, DatasetSection, HeadSection, Splits, DEFAULT_SPLIT};
pub use report::{render_table, HeadSummary, Provenance, RunReport, Summary};
pub use runner::{run_benchmark, run_single, RunOutcome};
