//! Matrix ingestion from CSV and JSON.

use std::path::Path;

use eventual_core::scalar::parse_decimal;
use eventual_core::{AnyMatrix, Backend, BigRational, Matrix};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    /// By extension, falling back to the first non-blank character.
    pub fn detect(path: Option<&Path>, text: &str) -> Format {
        match path.and_then(|p| p.extension()).and_then(|e| e.to_str()).map(str::to_ascii_lowercase) {
            Some(e) if e == "json" => Format::Json,
            Some(e) if e == "csv" => Format::Csv,
            _ if text.trim_start().starts_with('{') => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// A parsed matrix with the literal tokens it came from.
#[derive(Clone, Debug)]
pub struct ParsedMatrix {
    pub matrix: AnyMatrix,
    pub format: Format,
    pub tokens: Vec<Vec<String>>,
}

enum Token {
    Text(String),
    /// A JSON number that is not an integer.
    BareFloat(f64),
}

fn bad_token(row: usize, col: usize, token: &str, why: &str) -> CliError {
    CliError::Parse(format!("row {row}, column {col}: cannot read {token:?}: {why}"))
}

fn exact_entry(row: usize, col: usize, token: &Token) -> Result<BigRational, CliError> {
    match token {
        Token::Text(s) => parse_decimal(s).ok_or_else(|| bad_token(row, col, s, "not a decimal or fraction")),
        Token::BareFloat(v) => Err(bad_token(
            row,
            col,
            &v.to_string(),
            "bare JSON floats are not accepted by the exact backend; quote the number as a string",
        )),
    }
}

fn float_entry(row: usize, col: usize, token: &Token) -> Result<f64, CliError> {
    let v = match token {
        Token::Text(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .or_else(|| parse_decimal(s).map(|q| eventual_core::Scalar::as_f64(&q)))
            .ok_or_else(|| bad_token(row, col, s, "not a number"))?,
        Token::BareFloat(v) => *v,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad_token(row, col, &v.to_string(), "not finite"))
    }
}

fn build(tokens: Vec<Vec<Token>>, backend: Backend, format: Format) -> Result<ParsedMatrix, CliError> {
    let n = tokens.len();
    if n == 0 {
        return Err(CliError::Parse("no rows".into()));
    }
    let width = tokens[0].len();
    for (i, row) in tokens.iter().enumerate() {
        if row.len() != width {
            return Err(CliError::Parse(format!(
                "ragged rows: row 1 has {width} entries but row {} has {}",
                i + 1,
                row.len()
            )));
        }
    }
    if width != n {
        return Err(CliError::Parse(format!("matrix is not square: {n} rows of {width} entries")));
    }
    let literal: Vec<Vec<String>> = tokens
        .iter()
        .map(|r| {
            r.iter()
                .map(|t| match t {
                    Token::Text(s) => s.trim().to_string(),
                    Token::BareFloat(v) => v.to_string(),
                })
                .collect()
        })
        .collect();
    let matrix = match backend {
        Backend::Exact => {
            let rows = collect_rows(&tokens, exact_entry)?;
            AnyMatrix::Exact(Matrix::from_rows(rows).map_err(|e| CliError::Parse(e.to_string()))?)
        }
        Backend::Float => {
            let rows = collect_rows(&tokens, float_entry)?;
            AnyMatrix::Float(Matrix::from_rows(rows).map_err(|e| CliError::Parse(e.to_string()))?)
        }
    };
    Ok(ParsedMatrix { matrix, format, tokens: literal })
}

fn collect_rows<T>(
    tokens: &[Vec<Token>],
    entry: impl Fn(usize, usize, &Token) -> Result<T, CliError>,
) -> Result<Vec<Vec<T>>, CliError> {
    tokens
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, t)| entry(i + 1, j + 1, t)).collect())
        .collect()
}

fn csv_tokens(text: &str) -> Result<Vec<Vec<Token>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Parse(format!("csv: {e}")))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push(record.iter().map(|s| Token::Text(s.to_string())).collect());
    }
    Ok(rows)
}

fn json_tokens(text: &str) -> Result<Vec<Vec<Token>>, CliError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("json: {e}")))?;
    let rows = doc
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Parse("json: expected an object with a \"rows\" array".into()))?;
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let row = row.as_array().ok_or_else(|| CliError::Parse(format!("json: row {} is not an array", i + 1)))?;
            row.iter()
                .enumerate()
                .map(|(j, v)| match v {
                    Value::String(s) => Ok(Token::Text(s.clone())),
                    Value::Number(num) if num.is_i64() || num.is_u64() => Ok(Token::Text(num.to_string())),
                    Value::Number(num) => Ok(Token::BareFloat(num.as_f64().unwrap_or(f64::NAN))),
                    other => Err(bad_token(i + 1, j + 1, &other.to_string(), "expected a number or a string")),
                })
                .collect()
        })
        .collect()
}

pub fn parse_matrix(text: &str, format: Format, backend: Backend) -> Result<ParsedMatrix, CliError> {
    let tokens = match format {
        Format::Csv => csv_tokens(text)?,
        Format::Json => json_tokens(text)?,
    };
    build(tokens, backend, format)
}

/// Reads `path`, or standard input for `-`.
pub fn read_matrix(path: &Path, backend: Backend) -> Result<ParsedMatrix, CliError> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Input(format!("stdin: {e}")))?
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
    };
    let format = Format::detect(Some(path), &text);
    parse_matrix(&text, format, backend)
}
