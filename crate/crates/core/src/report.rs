//! JSON and CSV serialization of harness reports.
//!
//! JSON is the lossless form (`schema_version` 1). CSV mirrors the published
//! table columns:
//!
//! * family scans: `family,graphs,unique,pairs,k,collisions,max_iterations`,
//!   where `collisions` lists groups as `5+25@k2` (or `@unresolved`),
//!   separated by `;`;
//! * margins: `family,min_linf,ratio,method`;
//! * rounding: `family,graphs,d6,…,d14`, one column per digit count.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use itertools::Itertools;
use serde::Serialize;

use crate::bench::{FamilyReport, MarginMethod, MarginReport, RoundingReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Harness(format!("unknown report format {other:?}"))),
        }
    }
}

/// A report with a tabular CSV rendering.
pub trait TableReport: Serialize {
    fn csv_header(&self) -> Vec<String>;
    fn csv_row(&self) -> Vec<String>;
}

impl TableReport for FamilyReport {
    fn csv_header(&self) -> Vec<String> {
        [
            "family",
            "graphs",
            "unique",
            "pairs",
            "k",
            "collisions",
            "max_iterations",
        ]
        .map(String::from)
        .to_vec()
    }

    fn csv_row(&self) -> Vec<String> {
        let groups = self
            .collisions
            .iter()
            .map(|c| {
                let members = c.members.iter().join("+");
                match c.resolved_at {
                    Some(k) => format!("{members}@k{k}"),
                    None => format!("{members}@unresolved"),
                }
            })
            .join(";");
        vec![
            self.family.clone(),
            self.graphs.to_string(),
            self.unique.to_string(),
            self.pairs.to_string(),
            self.k.to_string(),
            groups,
            self.max_iterations.to_string(),
        ]
    }
}

impl TableReport for MarginReport {
    fn csv_header(&self) -> Vec<String> {
        ["family", "min_linf", "ratio", "method"]
            .map(String::from)
            .to_vec()
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            self.family.clone(),
            format!("{:.6e}", self.min_linf),
            format!("{:.0}", self.ratio),
            match self.method {
                MarginMethod::Exact => "exact".into(),
                MarginMethod::Sampled => "sampled".into(),
            },
        ]
    }
}

impl TableReport for RoundingReport {
    fn csv_header(&self) -> Vec<String> {
        let mut h = vec!["family".to_string(), "graphs".to_string()];
        h.extend(self.unique_by_digits.keys().map(|d| format!("d{d}")));
        h
    }

    fn csv_row(&self) -> Vec<String> {
        let mut r = vec![self.family.clone(), self.graphs.to_string()];
        r.extend(self.unique_by_digits.values().map(usize::to_string));
        r
    }
}

/// Renders several reports of one kind. CSV gets one header then one row each.
pub fn render_reports<R: TableReport>(reports: &[R], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut s = if reports.len() == 1 {
                serde_json::to_string_pretty(&reports[0])?
            } else {
                serde_json::to_string_pretty(reports)?
            };
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header_written = false;
            for r in reports {
                if !header_written {
                    w.write_record(r.csv_header()).map_err(csv_err)?;
                    header_written = true;
                }
                w.write_record(r.csv_row()).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Harness(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Harness(format!("csv: {e}"))
}

pub fn emit_report<R: TableReport>(
    report: &R,
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let text = render_reports(std::slice::from_ref(report), format)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
