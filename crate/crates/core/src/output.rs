//! Tabular command output in three formats, and parsers that read the
//! machine formats back.
//!
//! csv:
//! ```text
//! # engine=sparse
//! # r=1/2
//! n,value
//! 0,1
//! 1,1/2
//! # result=pass
//! ```
//!
//! jsonl: a `{"meta": {...}}` line, one object per row keyed by column name,
//! then an optional `{"summary": {...}}` line. Every cell is a JSON string so
//! big integers and fractions survive unchanged.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::arith::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Human,
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "human" => Ok(Format::Human),
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" => Ok(Format::Jsonl),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Human => "human",
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        })
    }
}

/// A titled table with ordered metadata and summary key/value pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OutputRecord {
    pub title: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<(String, String)>,
}

impl OutputRecord {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        OutputRecord {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn summary(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.summary.push((key.to_string(), value.to_string()));
        self
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
        self
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Human => self.write_human(out),
            Format::Csv => self.write_csv(out),
            Format::Jsonl => self.write_jsonl(out),
        }
    }

    fn write_human(&self, out: &mut dyn Write) -> io::Result<()> {
        let header: Vec<String> = self.meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(out, "{}: {}", self.title, header.join(" "))?;
        if !self.columns.is_empty() && !self.rows.is_empty() {
            let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
            for row in &self.rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.len());
                }
            }
            let line = |cells: &[String]| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            writeln!(out, "{}", line(&self.columns))?;
            for row in &self.rows {
                writeln!(out, "{}", line(row))?;
            }
        }
        for (k, v) in &self.summary {
            writeln!(out, "{k}: {v}")?;
        }
        Ok(())
    }

    fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "# command={}", self.title)?;
        for (k, v) in &self.meta {
            writeln!(out, "# {k}={v}")?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(&self.columns)?;
            for row in &self.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        for (k, v) in &self.summary {
            writeln!(out, "# {k}={v}")?;
        }
        Ok(())
    }

    fn write_jsonl(&self, out: &mut dyn Write) -> io::Result<()> {
        let pairs = |items: &[(String, String)]| -> Value {
            Value::Object(
                items
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                    .collect(),
            )
        };
        let mut meta = Map::new();
        meta.insert("command".into(), Value::String(self.title.clone()));
        if let Value::Object(m) = pairs(&self.meta) {
            meta.extend(m);
        }
        writeln!(
            out,
            "{}",
            Value::Object(Map::from_iter([("meta".to_string(), Value::Object(meta))]))
        )?;
        for row in &self.rows {
            let obj: Map<String, Value> = self
                .columns
                .iter()
                .zip(row)
                .map(|(c, v)| (c.clone(), Value::String(v.clone())))
                .collect();
            writeln!(out, "{}", Value::Object(obj))?;
        }
        if !self.summary.is_empty() {
            writeln!(
                out,
                "{}",
                Value::Object(Map::from_iter([(
                    "summary".to_string(),
                    pairs(&self.summary)
                )]))
            )?;
        }
        Ok(())
    }
}

fn split_pair(line: &str) -> Option<(String, String)> {
    line.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
}

fn string_pairs(value: &Value) -> Result<Vec<(String, String)>> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("expected a JSON object".into()))?;
    obj.iter()
        .map(|(k, v)| match v {
            Value::String(s) => Ok((k.clone(), s.clone())),
            other => Err(Error::Parse(format!(
                "expected a string for {k:?}, got {other}"
            ))),
        })
        .collect()
}

/// Reads back a csv or jsonl dump written by [`OutputRecord::write`].
///
/// Comment lines before the header become metadata; comment lines after the
/// first data row become the summary.
pub fn parse_record(text: &str, format: Format) -> Result<OutputRecord> {
    match format {
        Format::Csv => parse_csv(text),
        Format::Jsonl => parse_jsonl(text),
        Format::Human => Err(Error::Parse("human output is not machine-readable".into())),
    }
}

fn parse_csv(text: &str) -> Result<OutputRecord> {
    let mut record = OutputRecord::default();
    let mut body = String::new();
    let mut seen_table = false;
    for line in text.lines() {
        match line.strip_prefix('#') {
            Some(comment) => {
                let (k, v) = split_pair(comment)
                    .ok_or_else(|| Error::Parse(format!("bad comment line {line:?}")))?;
                if !seen_table {
                    if k == "command" {
                        record.title = v;
                    } else {
                        record.meta.push((k, v));
                    }
                } else {
                    record.summary.push((k, v));
                }
            }
            None => {
                seen_table = true;
                body.push_str(line);
                body.push('\n');
            }
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(body.as_bytes());
    record.columns = reader
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        record.rows.push(row.iter().map(str::to_string).collect());
    }
    Ok(record)
}

fn parse_jsonl(text: &str) -> Result<OutputRecord> {
    let mut record = OutputRecord::default();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let value: Value = serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(meta) = value.get("meta") {
            for (k, v) in string_pairs(meta)? {
                if k == "command" {
                    record.title = v;
                } else {
                    record.meta.push((k, v));
                }
            }
        } else if let Some(summary) = value.get("summary") {
            record.summary = string_pairs(summary)?;
        } else {
            let cells = string_pairs(&value)?;
            if record.columns.is_empty() {
                record.columns = cells.iter().map(|(k, _)| k.clone()).collect();
            }
            record
                .rows
                .push(cells.into_iter().map(|(_, v)| v).collect());
        }
    }
    Ok(record)
}

/// Interprets a two-column `(n, value)` table as a coefficient list.
pub fn coefficient_rows(record: &OutputRecord) -> Result<Vec<(usize, Rational)>> {
    record
        .rows
        .iter()
        .map(|row| match row.as_slice() {
            [n, v] => {
                let n = n
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad index {n:?}")))?;
                Ok((n, v.parse::<Rational>()?))
            }
            _ => Err(Error::Parse(format!(
                "expected two columns, got {}",
                row.len()
            ))),
        })
        .collect()
}
