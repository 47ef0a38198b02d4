use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::{BenchmarkRecord, Metric};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Parameter(format!("unknown output format {other:?}"))),
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse { line: 0, message: format!("{other:?}") },
    }
}

/// Writes records as CSV with the fixed header
/// `dataset,item,method,params,perturbation,metric,value,seed`.
pub fn write_csv<W: Write>(records: &[BenchmarkRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["dataset", "item", "method", "params", "perturbation", "metric", "value", "seed"])
        .map_err(csv_error)?;
    for r in records {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(records: &[BenchmarkRecord], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records)
        .map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Writes records to `path`, replacing it atomically via a sibling temp file.
pub fn emit_results(records: &[BenchmarkRecord], path: &Path, format: OutputFormat) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut out = BufWriter::new(File::create(&tmp)?);
        match format {
            OutputFormat::Csv => write_csv(records, &mut out)?,
            OutputFormat::Json => write_json(records, &mut out)?,
        }
        out.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_results(path: &Path, format: OutputFormat) -> Result<Vec<BenchmarkRecord>> {
    match format {
        OutputFormat::Csv => {
            let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
            r.deserialize().map(|row| row.map_err(csv_error)).collect()
        }
        OutputFormat::Json => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| Error::Parse {
                line: e.line(),
                message: e.to_string(),
            })
        }
    }
}

/// Mean and sample standard deviation of one (method, params, perturbation,
/// metric) group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub method: String,
    pub params: String,
    pub perturbation: String,
    pub metric: Metric,
    pub count: usize,
    pub mean: f64,
    pub std: f64,
}

/// Groups records and averages them in sorted item order, so sums are
/// reproducible.
pub fn summarize(records: &[BenchmarkRecord]) -> Vec<Summary> {
    let mut groups: BTreeMap<(&str, &str, &str, Metric), Vec<(&str, u64, f64)>> = BTreeMap::new();
    for r in records {
        groups
            .entry((&r.method, &r.params, &r.perturbation, r.metric))
            .or_default()
            .push((&r.item, r.seed, r.value));
    }
    groups
        .into_iter()
        .map(|((method, params, perturbation, metric), mut values)| {
            values.sort_by(|a, b| a.0.cmp(b.0).then(a.1.cmp(&b.1)).then(a.2.total_cmp(&b.2)));
            let n = values.len();
            let mean = values.iter().map(|v| v.2).sum::<f64>() / n as f64;
            let var = if n > 1 {
                values.iter().map(|v| (v.2 - mean).powi(2)).sum::<f64>() / (n - 1) as f64
            } else {
                0.0
            };
            Summary {
                method: method.to_string(),
                params: params.to_string(),
                perturbation: perturbation.to_string(),
                metric,
                count: n,
                mean,
                std: var.sqrt(),
            }
        })
        .collect()
}
