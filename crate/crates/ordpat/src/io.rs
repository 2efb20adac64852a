//! Reading series and covariance tables from text files.
//!
//! Accepted layouts: one value per line, whitespace-separated columns, or
//! comma-separated columns. A first row that does not parse as numbers is
//! treated as a header. Blank lines and lines starting with `#` are skipped.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Column selector: a header name or a zero-based index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Index(usize),
    Name(String),
}

impl std::str::FromStr for Column {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => Column::Index(i),
            Err(_) => Column::Name(s.to_string()),
        })
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Rows of fields with 1-based line numbers.
fn rows(path: &Path, text: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let comma = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .is_some_and(|l| l.contains(','));
    if !comma {
        return Ok(text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|(i, l)| (i + 1, l.split_whitespace().map(str::to_string).collect()))
            .collect());
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

fn parse_value(path: &Path, line: usize, field: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| parse_err(path, line, format!("not a number: {field:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("non-finite value {field:?}")));
    }
    Ok(v)
}

fn is_header(fields: &[String]) -> bool {
    fields.iter().any(|f| f.parse::<f64>().is_err())
}

/// Parses series text; `column` defaults to the first column.
pub fn parse_series(path: &Path, text: &str, column: Option<&Column>) -> Result<Vec<f64>> {
    let mut rows = rows(path, text)?;
    let header = match rows.first() {
        Some((_, f)) if is_header(f) => Some(rows.remove(0).1),
        _ => None,
    };
    let index = match column {
        None => 0,
        Some(Column::Index(i)) => *i,
        Some(Column::Name(name)) => {
            let h = header
                .as_ref()
                .ok_or_else(|| parse_err(path, 1, format!("column {name:?} requested but no header row")))?;
            h.iter()
                .position(|f| f == name)
                .ok_or_else(|| parse_err(path, 1, format!("no column named {name:?}")))?
        }
    };
    let mut out = Vec::with_capacity(rows.len());
    for (line, fields) in &rows {
        let field = fields
            .get(index)
            .ok_or_else(|| parse_err(path, *line, format!("missing column {index}")))?;
        out.push(parse_value(path, *line, field)?);
    }
    if out.is_empty() {
        return Err(parse_err(path, 0, "no data rows"));
    }
    Ok(out)
}

pub fn read_series(path: &Path, column: Option<&Column>) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_series(path, &text, column)
}

/// Autocorrelation table `r(0), r(1), ...`: one value per line (lag 0 first),
/// or `lag,value` rows whose lags must run `0, 1, 2, ...`.
pub fn read_cov_table(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = rows(path, &text)?;
    if rows.first().is_some_and(|(_, f)| is_header(f)) {
        rows.remove(0);
    }
    let mut out = Vec::with_capacity(rows.len());
    for (k, (line, fields)) in rows.iter().enumerate() {
        let value = match fields.as_slice() {
            [v] => v,
            [lag, v] => {
                let lag: usize = lag
                    .parse()
                    .map_err(|_| parse_err(path, *line, format!("bad lag {lag:?}")))?;
                if lag != k {
                    return Err(parse_err(path, *line, format!("expected lag {k}, found {lag}")));
                }
                v
            }
            _ => return Err(parse_err(path, *line, "expected `value` or `lag,value`")),
        };
        out.push(parse_value(path, *line, value)?);
    }
    if out.is_empty() {
        return Err(parse_err(path, 0, "empty covariance table"));
    }
    Ok(out)
}
