//! Experiment manifests, dataset files, summaries and the command line.

pub mod cli;
pub mod experiment;
pub mod io;
pub mod manifest;
pub mod records;
pub mod summary;

use std::path::Path;

use crate::error::Result;
use crate::selector::LabeledDataset;

pub use experiment::{run_experiment, ExperimentReport};
pub use manifest::ExperimentManifest;
pub use summary::{summarize, RatioStats, SummaryTable};

/// Loads `features.csv` and `labels.csv` of a dataset directory.
pub fn load_dataset(dir: &Path) -> Result<LabeledDataset> {
    let features = records::parse_features_table(&io::Table::read(&dir.join(experiment::FEATURES_FILE))?)?;
    let labels = io::Table::read(&dir.join(experiment::LABELS_FILE))?;
    records::join_dataset(&labels, &features)
}

/// Recomputes the summary of a dataset directory from gw.csv and runs.csv.
pub fn summarize_dir(dir: &Path, depths: Option<&[usize]>) -> Result<SummaryTable> {
    let gw_table = io::Table::read(&dir.join(experiment::GW_FILE))?;
    let hash = gw_table.manifest_hash.clone().unwrap_or_default();
    let gw = records::parse_gw_table(&gw_table)?;
    let runs = records::parse_runs_table(&io::Table::read(&dir.join(experiment::RUNS_FILE))?)?;
    let depths: Vec<usize> = match depths {
        Some(d) => d.to_vec(),
        None => {
            let mut d: Vec<usize> = runs.keys().map(|&(_, p)| p).collect();
            d.sort_unstable();
            d.dedup();
            d
        }
    };
    let s = summarize(&gw, &runs, &depths)?;
    summary::write_summary(dir, &s, &gw, &runs, &hash)?;
    Ok(s)
}
