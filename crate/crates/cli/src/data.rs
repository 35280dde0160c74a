//! CSV ingestion and truncation filtering.

use std::path::Path;

use anyhow::{bail, Context, Result};
use ltll_core::dist::Sample;
use serde::Serialize;

pub const BUILTIN_BLADDER: &str = "builtin:bladder";
const BLADDER_CSV: &str = include_str!("../data/bladder_cancer.csv");

/// Column chosen by zero-based index or by header name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl ColumnSelector {
    pub fn parse(raw: &str) -> Self {
        match raw.parse::<usize>() {
            Ok(i) => Self::Index(i),
            Err(_) => Self::Name(raw.to_string()),
        }
    }
}

impl Default for ColumnSelector {
    fn default() -> Self {
        Self::Index(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedRow {
    pub line: usize,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetFile {
    pub source: String,
    pub column: Option<String>,
    pub values: Vec<f64>,
    pub skipped: Vec<SkippedRow>,
    /// Leading `#` comment lines.
    pub provenance: Vec<String>,
}

impl DatasetFile {
    pub fn warnings(&self) -> Vec<String> {
        if self.skipped.is_empty() {
            return Vec::new();
        }
        let lines: Vec<String> = self.skipped.iter().map(|s| s.line.to_string()).collect();
        vec![format!(
            "{}: skipped {} non-numeric row(s) at line(s) {}",
            self.source,
            self.skipped.len(),
            lines.join(", ")
        )]
    }
}

/// Loads `path` (or the bundled dataset for `builtin:bladder`).
pub fn load_csv(path: &str, column: &ColumnSelector) -> Result<DatasetFile> {
    if path == BUILTIN_BLADDER {
        return parse_csv(BLADDER_CSV, path, column);
    }
    let text = std::fs::read_to_string(Path::new(path))
        .with_context(|| format!("cannot read data file {path}"))?;
    parse_csv(&text, path, column)
}

pub fn parse_csv(text: &str, source: &str, column: &ColumnSelector) -> Result<DatasetFile> {
    let provenance = text
        .lines()
        .take_while(|l| l.trim_start().starts_with('#'))
        .map(|l| l.trim_start().trim_start_matches('#').trim().to_string())
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let mut index = match column {
        ColumnSelector::Index(i) => Some(*i),
        ColumnSelector::Name(_) => None,
    };
    let mut values = Vec::new();
    let mut skipped = Vec::new();
    let mut non_positive = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.with_context(|| format!("malformed CSV in {source}"))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let Some(col) = index else {
            let ColumnSelector::Name(name) = column else {
                unreachable!()
            };
            match record.iter().position(|h| h == name) {
                Some(i) => {
                    index = Some(i);
                    first = false;
                }
                None => bail!("{source}: header row at line {line} has no column named {name:?}"),
            }
            continue;
        };
        let cell = record.get(col).unwrap_or("");
        let is_first = std::mem::replace(&mut first, false);
        if is_first && matches!(column, ColumnSelector::Index(_)) && cell.parse::<f64>().is_err() {
            // header row
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => values.push(v),
            Ok(v) if v.is_finite() => non_positive.push(format!("line {line}: {v}")),
            _ => skipped.push(SkippedRow {
                line,
                content: record.iter().collect::<Vec<_>>().join(","),
            }),
        }
    }
    if index.is_none() {
        bail!("{source}: no header row found for column {column:?}");
    }
    if !non_positive.is_empty() {
        bail!(
            "{source}: values must be positive; offending rows: {}",
            non_positive.join("; ")
        );
    }
    if values.is_empty() {
        bail!("{source}: no numeric values left after filtering");
    }
    Ok(DatasetFile {
        source: source.to_string(),
        column: match column {
            ColumnSelector::Index(i) => Some(i.to_string()),
            ColumnSelector::Name(n) => Some(n.clone()),
        },
        values,
        skipped,
        provenance,
    })
}

#[derive(Debug, Clone)]
pub struct Truncated {
    pub sample: Sample,
    pub retained: usize,
    pub dropped: usize,
}

/// Keeps values strictly above `x_l`; at least two distinct values must survive.
pub fn apply_truncation(d: &DatasetFile, x_l: f64) -> Result<Truncated> {
    if !(x_l >= 0.0 && x_l.is_finite()) {
        bail!("truncation point must be finite and non-negative, got {x_l}");
    }
    let kept: Vec<f64> = d.values.iter().copied().filter(|&v| v > x_l).collect();
    let retained = kept.len();
    let distinct = kept.iter().any(|&v| v != kept[0]);
    if retained < 2 || !distinct {
        bail!(
            "{}: only {retained} value(s) exceed x_L = {x_l}; at least two distinct values are needed",
            d.source
        );
    }
    Ok(Truncated {
        sample: Sample::new(kept, x_l)?,
        retained,
        dropped: d.values.len() - retained,
    })
}
