//! CSV and JSON benchmark reports.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bench::{sort_records, BenchRecord, CellFailure};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "backend,p,elements,m,m_bar,time_s,nnz,rel_diff,qpoints";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// JSON report body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub threads: usize,
    pub seed: u64,
    pub records: Vec<BenchRecord>,
    #[serde(default)]
    pub failures: Vec<CellFailure>,
}

/// Writes the records sorted by `(backend, p, elements, m)`. An absent
/// `rel_diff` is an empty CSV field.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in &sorted {
        w.write_record([
            r.backend.name().to_string(),
            r.p.to_string(),
            r.elements.to_string(),
            r.m.to_string(),
            r.m_bar.to_string(),
            format!("{:e}", r.time_s),
            r.nnz.to_string(),
            r.rel_diff.map_or_else(String::new, |d| format!("{d:e}")),
            r.qpoints.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(report: &JsonReport, out: W) -> Result<()> {
    let mut sorted = report.clone();
    sort_records(&mut sorted.records);
    serde_json::to_writer_pretty(out, &sorted)?;
    Ok(())
}

/// Writes a report file.
pub fn emit_report(
    records: &[BenchRecord],
    failures: &[CellFailure],
    format: ReportFormat,
    path: &Path,
    threads: usize,
    seed: u64,
) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Config("no records to report".into()));
    }
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        ReportFormat::Csv => write_csv(records, &mut out)?,
        ReportFormat::Json => {
            let report = JsonReport { threads, seed, records: records.to_vec(), failures: failures.to_vec() };
            write_json(&report, &mut out)?;
        }
    }
    out.flush()?;
    Ok(())
}
