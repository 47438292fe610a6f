//! Run reports and their CSV / JSON encodings.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Column names ending in this suffix hold entropies and follow `--bits`.
pub const NATS_SUFFIX: &str = "_nats";
const BITS_SUFFIX: &str = "_bits";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }

    /// CSV text: shortest round-trip decimal, scientific for `0 < |x| < 1e-3`.
    pub fn csv_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

pub fn format_float(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// One pass/fail judgement against a configured tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    /// The measured quantity, absent when there was nothing to measure.
    pub value: Option<f64>,
    /// Human-readable acceptance condition, e.g. `< 1e-10`.
    pub criterion: String,
    pub pass: bool,
}

impl Verdict {
    pub fn new(name: &str, value: f64, criterion: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.to_string(),
            value: Some(value).filter(|v| v.is_finite()),
            criterion: criterion.into(),
            pass: pass && value.is_finite(),
        }
    }

    pub fn below(name: &str, value: f64, limit: f64) -> Self {
        Self::new(name, value, format!("< {}", format_float(limit)), value < limit)
    }

    pub fn missing(name: &str, criterion: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            value: None,
            criterion: criterion.into(),
            pass: false,
        }
    }
}

/// Wall-clock data; the only part of a report that may differ between runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timestamp {
    pub started_unix_ms: u64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub version: String,
    pub parameters: Map<String, Value>,
    pub entropy_unit: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
    pub timestamp: Timestamp,
}

impl RunReport {
    /// Converts every `*_nats` column to bits. Verdicts keep their native units.
    pub fn convert_to_bits(&mut self) {
        if self.entropy_unit == "bits" {
            return;
        }
        let ln2 = std::f64::consts::LN_2;
        let targets: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.ends_with(NATS_SUFFIX))
            .map(|(i, _)| i)
            .collect();
        for &i in &targets {
            let stem = self.columns[i].trim_end_matches(NATS_SUFFIX).to_string();
            self.columns[i] = stem + BITS_SUFFIX;
        }
        for row in &mut self.rows {
            for &i in &targets {
                if let Cell::Float(v) = row[i] {
                    row[i] = Cell::Float(v / ln2);
                }
            }
        }
        self.entropy_unit = "bits".into();
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_text)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("UTF-8")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        out.write_all(self.render(format).as_bytes())
    }
}

/// JSON text of a report with the `timestamp` entry removed, for determinism
/// comparisons. Key order is preserved.
pub fn strip_timestamp(json: &str) -> serde_json::Result<String> {
    let mut value: Value = serde_json::from_str(json)?;
    if let Some(obj) = value.as_object_mut() {
        obj.shift_remove("timestamp");
    }
    serde_json::to_string_pretty(&value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}
