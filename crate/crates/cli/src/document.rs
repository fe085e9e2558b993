//! Interchange formats: structured JSON documents, headerless CSV and an
//! aligned text grid.
//!
//! Exact values travel as strings (`"1/2"` for parameters, `"-sqrt(2/3)"` for
//! entries) so exact pipelines never pass through floats. CSV is float-only.

use std::fmt::Write as _;
use std::str::FromStr;

use hessenberg_core::radical::parse_rational;
use hessenberg_core::{Matrix, Mode, ParamVector, Radical};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("expected {expected} entries for n = {n}, got {got}")]
    EntryCount { n: usize, expected: usize, got: usize },
    #[error("entry {index}: {message}")]
    Entry { index: usize, message: String },
    #[error("parameter {index}: {message}")]
    Param { index: usize, message: String },
    #[error("CSV carries floats only; exact documents need json or text")]
    ExactCsv,
    #[error("malformed {format} input: {message}")]
    Malformed { format: &'static str, message: String },
    #[error("empty input")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A JSON scalar that is either a string (exact) or a number (float).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Text(String),
    Number(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    #[serde(default)]
    pub args: Vec<String>,
    /// 1-based indices of parameters that did not affect the result.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unconstrained: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub n: usize,
    pub mode: Mode,
    pub entries: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

pub fn params_to_values(z: &ParamVector) -> Vec<Value> {
    match z {
        ParamVector::Exact(v) => v.iter().map(|r| Value::Text(r.to_string())).collect(),
        ParamVector::Float(v) => v.iter().map(|&x| Value::Number(x)).collect(),
    }
}

impl MatrixDocument {
    pub fn from_matrix(m: &Matrix, params: Option<&ParamVector>, provenance: Option<Provenance>) -> Self {
        let entries = match m {
            Matrix::Exact { entries, .. } => entries.iter().map(|r| Value::Text(r.to_string())).collect(),
            Matrix::Float { entries, .. } => entries.iter().map(|&x| Value::Number(x)).collect(),
        };
        MatrixDocument {
            n: m.n(),
            mode: m.mode(),
            entries,
            params: params.map(params_to_values),
            provenance,
        }
    }

    pub fn to_matrix(&self) -> Result<Matrix, DocumentError> {
        let expected = self.n * self.n;
        if self.entries.len() != expected {
            return Err(DocumentError::EntryCount {
                n: self.n,
                expected,
                got: self.entries.len(),
            });
        }
        let bad = |index: usize, message: &str| DocumentError::Entry {
            index,
            message: message.to_string(),
        };
        match self.mode {
            Mode::Exact => {
                let entries = self
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(k, v)| match v {
                        Value::Text(s) => Radical::from_str(s).map_err(|e| bad(k, &e.to_string())),
                        Value::Number(_) => Err(bad(k, "exact entries must be strings")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Matrix::from_exact(self.n, entries).expect("count checked"))
            }
            Mode::Float => {
                let entries = self
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(k, v)| match v {
                        Value::Number(x) => Ok(*x),
                        Value::Text(s) => s.trim().parse::<f64>().map_err(|_| bad(k, "not a number")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Matrix::from_float(self.n, entries).expect("count checked"))
            }
        }
    }

    /// The generating parameters, exact when all are rational strings.
    pub fn params(&self) -> Result<Option<ParamVector>, DocumentError> {
        let Some(values) = &self.params else {
            return Ok(None);
        };
        let all_text = values.iter().all(|v| matches!(v, Value::Text(_)));
        let bad = |index: usize, message: String| DocumentError::Param { index, message };
        let z = if all_text {
            let z = values
                .iter()
                .enumerate()
                .map(|(k, v)| match v {
                    Value::Text(s) => parse_rational(s).ok_or_else(|| bad(k + 1, format!("not a rational: {s:?}"))),
                    Value::Number(_) => unreachable!(),
                })
                .collect::<Result<Vec<BigRational>, _>>()?;
            ParamVector::exact(z).map_err(|e| bad(0, e.to_string()))?
        } else {
            let z = values
                .iter()
                .enumerate()
                .map(|(k, v)| match v {
                    Value::Number(x) => Ok(*x),
                    Value::Text(s) => s.parse::<f64>().map_err(|_| bad(k + 1, format!("not a number: {s:?}"))),
                })
                .collect::<Result<Vec<f64>, _>>()?;
            ParamVector::float(z).map_err(|e| bad(0, e.to_string()))?
        };
        Ok(Some(z))
    }
}

fn entry_text(v: &Value) -> String {
    match v {
        Value::Text(s) => s.clone(),
        // Debug keeps a decimal point or exponent, so floats never read back
        // as exact radicals.
        Value::Number(x) => format!("{x:?}"),
    }
}

pub fn render(doc: &MatrixDocument, format: Format) -> Result<String, DocumentError> {
    let n = doc.n;
    match format {
        Format::Json => Ok(serde_json::to_string(doc).expect("documents serialize") + "\n"),
        Format::Csv => {
            if doc.mode == Mode::Exact {
                return Err(DocumentError::ExactCsv);
            }
            let m = doc.to_matrix()?;
            let mut out = String::new();
            for r in 0..n {
                let row: Vec<String> = (0..n).map(|c| m.get_f64(r, c).to_string()).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
            Ok(out)
        }
        Format::Text => {
            let cells: Vec<String> = doc.entries.iter().map(entry_text).collect();
            let widths: Vec<usize> = (0..n)
                .map(|c| (0..n).map(|r| cells[r * n + c].len()).max().unwrap_or(0))
                .collect();
            let mut out = String::new();
            for r in 0..n {
                let mut line = String::new();
                for c in 0..n {
                    if c > 0 {
                        line.push_str("  ");
                    }
                    let _ = write!(line, "{:<w$}", cells[r * n + c], w = widths[c]);
                }
                out.push_str(line.trim_end());
                out.push('\n');
            }
            Ok(out)
        }
    }
}

/// Renders a sequence of documents: JSON one per line, CSV and text blocks
/// separated by a blank line.
pub fn render_stream<'a>(
    docs: impl IntoIterator<Item = &'a MatrixDocument>,
    format: Format,
) -> Result<String, DocumentError> {
    let mut out = String::new();
    for (k, doc) in docs.into_iter().enumerate() {
        if k > 0 && format != Format::Json {
            out.push('\n');
        }
        out.push_str(&render(doc, format)?);
    }
    Ok(out)
}

fn parse_grid(block: &str, format: Format) -> Result<MatrixDocument, DocumentError> {
    let name = if format == Format::Csv { "csv" } else { "text" };
    let malformed = |message: String| DocumentError::Malformed { format: name, message };
    let rows: Vec<Vec<&str>> = block
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| match format {
            Format::Csv => l.split(',').map(str::trim).collect(),
            _ => l.split_whitespace().collect(),
        })
        .collect();
    let n = rows.len();
    if n == 0 {
        return Err(DocumentError::Empty);
    }
    if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != n) {
        return Err(malformed(format!("row {} has {} entries, expected {n}", r + 1, row.len())));
    }
    let tokens: Vec<&str> = rows.into_iter().flatten().collect();
    let floats = || {
        tokens
            .iter()
            .map(|t| t.parse::<f64>().map(Value::Number).map_err(|_| malformed(format!("not a number: {t:?}"))))
            .collect::<Result<Vec<_>, _>>()
    };
    let (mode, entries) = if format == Format::Csv {
        (Mode::Float, floats()?)
    } else if tokens.iter().all(|t| Radical::from_str(t).is_ok()) {
        (Mode::Exact, tokens.iter().map(|t| Value::Text(t.to_string())).collect())
    } else {
        (Mode::Float, floats()?)
    };
    Ok(MatrixDocument {
        n,
        mode,
        entries,
        params: None,
        provenance: None,
    })
}

/// Guesses the format of an input: JSON if it starts with `{`, CSV if it
/// contains commas, text otherwise.
pub fn sniff(input: &str) -> Format {
    let t = input.trim_start();
    if t.starts_with('{') {
        Format::Json
    } else if t.contains(',') {
        Format::Csv
    } else {
        Format::Text
    }
}

/// Parses every document in `input`.
pub fn parse_stream(input: &str, format: Option<Format>) -> Result<Vec<MatrixDocument>, DocumentError> {
    let format = format.unwrap_or_else(|| sniff(input));
    let docs = match format {
        Format::Json => serde_json::Deserializer::from_str(input)
            .into_iter::<MatrixDocument>()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| DocumentError::Malformed {
                format: "json",
                message: e.to_string(),
            })?,
        _ => {
            let mut docs = Vec::new();
            let mut block = String::new();
            for line in input.lines().chain(std::iter::once("")) {
                if line.trim().is_empty() {
                    if !block.trim().is_empty() {
                        docs.push(parse_grid(&block, format)?);
                    }
                    block.clear();
                } else {
                    block.push_str(line);
                    block.push('\n');
                }
            }
            docs
        }
    };
    if docs.is_empty() {
        return Err(DocumentError::Empty);
    }
    for d in &docs {
        d.to_matrix()?;
    }
    Ok(docs)
}
