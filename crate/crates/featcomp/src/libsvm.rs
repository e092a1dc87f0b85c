//! LIBSVM text format.
//!
//! ```text
//! +1 1:0.5 3:2.0
//! -1 2:1.0
//! ```
//!
//! One datapoint per nonempty line: a label followed by `index:value` pairs
//! with 1-based, strictly ascending indices. Lines end in LF or CRLF and a
//! `#` starts a comment.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use featcomp_core::{Dataset, SparseRow};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineError {
    #[error("label `{0}` is not a finite number")]
    Label(String),
    #[error("token `{0}` is not an index:value pair")]
    Token(String),
    #[error("feature index `{0}` is not a positive integer")]
    Index(String),
    #[error("feature value `{0}` is not a finite number")]
    Value(String),
    #[error("feature index {found} does not exceed the previous index {previous}")]
    NotAscending { previous: u32, found: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    pub kind: LineError,
}

fn parse_finite(tok: &str) -> Option<f64> {
    let tok = tok.strip_prefix('+').unwrap_or(tok);
    tok.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_line(line: &str) -> Result<Option<(f64, SparseRow)>, LineError> {
    let content = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    let mut tokens = content.split_whitespace();
    let Some(label_tok) = tokens.next() else {
        return Ok(None);
    };
    let label = parse_finite(label_tok).ok_or_else(|| LineError::Label(label_tok.to_owned()))?;
    let mut indices = Vec::new();
    let mut values = Vec::new();
    for tok in tokens {
        let (idx, val) = tok.split_once(':').ok_or_else(|| LineError::Token(tok.to_owned()))?;
        let index: u32 = idx
            .parse()
            .ok()
            .filter(|&i| i >= 1)
            .ok_or_else(|| LineError::Index(idx.to_owned()))?;
        let value = parse_finite(val).ok_or_else(|| LineError::Value(val.to_owned()))?;
        if let Some(&previous) = indices.last() {
            if index <= previous {
                return Err(LineError::NotAscending { previous, found: index });
            }
        }
        indices.push(index);
        values.push(value);
    }
    let row = SparseRow::new(indices, values).expect("indices validated while parsing");
    Ok(Some((label, row)))
}

/// Parse a whole LIBSVM document. `dim` is the largest index seen.
pub fn parse(text: &str) -> Result<Dataset, ParseError> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    // `lines` already strips a trailing '\r'
    for (n, line) in text.lines().enumerate() {
        match parse_line(line) {
            Ok(Some((label, row))) => {
                labels.push(label);
                rows.push(row);
            }
            Ok(None) => {}
            Err(kind) => return Err(ParseError { line: n + 1, kind }),
        }
    }
    Ok(Dataset::new(rows, Some(labels), None).expect("labels match rows"))
}

/// Write a dataset back out; unlabeled rows get label 0.
///
/// Values use the shortest representation that parses back to the same
/// `f64`, so `parse(serialize(d)) == d`.
pub fn serialize(data: &Dataset) -> String {
    let mut out = String::new();
    for (i, row) in data.rows().iter().enumerate() {
        let label = data.labels().map_or(0.0, |l| l[i]);
        write_num(&mut out, label);
        for (idx, val) in row.iter() {
            write!(out, " {idx}:").unwrap();
            write_num(&mut out, val);
        }
        out.push('\n');
    }
    out
}

fn write_num(out: &mut String, v: f64) {
    let a = v.abs();
    if a != 0.0 && !(1e-4..1e16).contains(&a) {
        write!(out, "{v:e}").unwrap();
    } else {
        write!(out, "{v}").unwrap();
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
}

pub fn read_file(path: &Path) -> Result<Dataset, LoadError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: shown.clone(),
        source,
    })?;
    parse(&text).map_err(|source| LoadError::Parse { path: shown, source })
}

pub fn write_file(path: &Path, data: &Dataset) -> std::io::Result<()> {
    fs::write(path, serialize(data))
}
