//! Distance-matrix ingestion and export. Matrices arrive as CSV (n rows of
//! n entries) or JSON ({"n": …, "dist": [[…]]}); entries are integers or
//! "p/q" rational strings, rescaled onto a common integer grid before
//! validation so all downstream arithmetic stays exact.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::MetricError;
use crate::Space;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum IngestError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("entry overflows the integer grid after denominator scaling")]
    Overflow,
}

fn parse_rational(token: &str) -> Result<Ratio<i64>, IngestError> {
    let token = token.trim();
    let bad = || IngestError::Parse(format!("invalid distance entry {token:?}"));
    if let Some((p, q)) = token.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(IngestError::Parse(format!("zero denominator in {token:?}")));
        }
        Ok(Ratio::new(p, q))
    } else {
        token.parse::<i64>().map(Ratio::from_integer).map_err(|_| bad())
    }
}

/// Scales a rational matrix onto a shared integer grid (multiplying by the
/// LCM of all denominators) and validates it as a metric.
pub fn space_from_rationals(rows: Vec<Vec<Ratio<i64>>>) -> Result<Space, IngestError> {
    if rows.iter().any(|r| r.iter().any(|x| x.is_negative())) {
        return Err(IngestError::Parse("negative distance entry".into()));
    }
    let mut lcm: i64 = 1;
    for row in &rows {
        for x in row {
            lcm = lcm
                .checked_mul(*x.denom() / lcm.gcd(x.denom()))
                .ok_or(IngestError::Overflow)?;
        }
    }
    let scaled: Vec<Vec<i64>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    x.numer()
                        .checked_mul(lcm / x.denom())
                        .ok_or(IngestError::Overflow)
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(Space::from_matrix(scaled)?)
}

/// Parses a CSV matrix: n lines, each with n comma-separated entries.
pub fn space_from_csv(text: &str) -> Result<Space, IngestError> {
    let rows: Vec<Vec<Ratio<i64>>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|line| line.split(',').map(parse_rational).collect())
        .collect::<Result<_, _>>()?;
    if rows.is_empty() {
        return Err(IngestError::Parse("empty matrix".into()));
    }
    space_from_rationals(rows)
}

#[derive(Deserialize)]
struct MatrixDoc {
    n: usize,
    dist: Vec<Vec<serde_json::Value>>,
}

/// Parses a JSON matrix document {"n": …, "dist": [[…]]} whose entries are
/// integers or "p/q" strings.
pub fn space_from_json(text: &str) -> Result<Space, IngestError> {
    let doc: MatrixDoc =
        serde_json::from_str(text).map_err(|e| IngestError::Parse(e.to_string()))?;
    if doc.dist.len() != doc.n || doc.dist.iter().any(|r| r.len() != doc.n) {
        return Err(IngestError::Parse(format!(
            "dist is not an {0}x{0} matrix",
            doc.n
        )));
    }
    let rows: Vec<Vec<Ratio<i64>>> = doc
        .dist
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| match v {
                    serde_json::Value::Number(x) => x
                        .as_i64()
                        .map(Ratio::from_integer)
                        .ok_or_else(|| IngestError::Parse(format!("non-integer number {x}"))),
                    serde_json::Value::String(s) => parse_rational(s),
                    other => Err(IngestError::Parse(format!("invalid entry {other}"))),
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    space_from_rationals(rows)
}

/// Parses a matrix file, choosing JSON when the content starts with '{'
/// and CSV otherwise.
pub fn space_from_text(text: &str) -> Result<Space, IngestError> {
    if text.trim_start().starts_with('{') {
        space_from_json(text)
    } else {
        space_from_csv(text)
    }
}

#[derive(Serialize)]
pub struct MatrixExport {
    pub n: usize,
    pub dist: Vec<Vec<i64>>,
}

pub fn matrix_rows(space: &Space) -> Vec<Vec<i64>> {
    (0..space.n())
        .map(|i| {
            (0..space.n())
                .map(|j| space.dist(crate::metric::pid(i), crate::metric::pid(j)))
                .collect()
        })
        .collect()
}

pub fn to_json(space: &Space) -> String {
    serde_json::to_string_pretty(&MatrixExport {
        n: space.n(),
        dist: matrix_rows(space),
    })
    .expect("plain integers always serialize")
}

pub fn to_csv(space: &Space) -> String {
    matrix_rows(space)
        .iter()
        .map(|row| {
            row.iter()
                .map(i64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}
