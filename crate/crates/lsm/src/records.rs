//! Metric log: CSV with header `run_id,config_hash,n_percent,epoch,split,metric,value`.

use std::fs::OpenOptions;
use std::path::Path;

use lsm_core::metrics::MetricRecord;
use serde::{Deserialize, Serialize};

use crate::error::{LsmError, Result};

pub const HEADER: [&str; 7] = ["run_id", "config_hash", "n_percent", "epoch", "split", "metric", "value"];

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    run_id: String,
    config_hash: String,
    n_percent: u32,
    epoch: usize,
    split: String,
    metric: String,
    value: f64,
}

impl From<&MetricRecord> for Row {
    fn from(r: &MetricRecord) -> Self {
        Row {
            run_id: r.run_id.clone(),
            config_hash: r.config_hash.clone(),
            n_percent: r.n_percent,
            epoch: r.epoch,
            split: r.split.clone(),
            metric: r.metric.clone(),
            value: r.value,
        }
    }
}

fn csv_err(path: &Path, e: csv::Error) -> LsmError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => LsmError::io(path, io),
        other => LsmError::format(path, format!("{other:?}")),
    }
}

/// Appends `records`, writing the header first when the file is new or
/// empty. Non-finite values are refused before anything is written.
pub fn append_records(path: &Path, records: &[MetricRecord]) -> Result<()> {
    for r in records {
        r.validate()?;
    }
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| LsmError::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if fresh {
        w.write_record(HEADER).map_err(|e| csv_err(path, e))?;
    }
    for r in records {
        w.serialize(Row::from(r)).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| LsmError::io(path, e))
}

/// Reads and validates a metric log: exact header, typed columns, finite
/// values.
pub fn read_records(path: &Path) -> Result<Vec<MetricRecord>> {
    let file = std::fs::File::open(path).map_err(|e| LsmError::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(LsmError::format(path, format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for row in r.deserialize::<Row>() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let rec = MetricRecord {
            run_id: row.run_id,
            config_hash: row.config_hash,
            n_percent: row.n_percent,
            epoch: row.epoch,
            split: row.split,
            metric: row.metric,
            value: row.value,
        };
        rec.validate().map_err(|e| LsmError::format(path, e.to_string()))?;
        out.push(rec);
    }
    Ok(out)
}

/// Writes a fresh metric log holding exactly `records`.
pub fn write_records(path: &Path, records: &[MetricRecord]) -> Result<()> {
    for r in records {
        r.validate()?;
    }
    match std::fs::remove_file(path) {
        Ok(()) => {}
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
        Err(e) => return Err(LsmError::io(path, e)),
    }
    append_records(path, records)
}
