//! Matrix JSON form: `{"n": 2, "entries": [[[re, im], ...], ...]}` (row-major).
//! Exact scalars are written as `"p/q"` strings, float scalars as numbers.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use super::matrix::Matrix;
use super::scalar::{parse_complex_literal, Scalar};
use super::MatError;

pub fn matrix_to_json<S: Scalar>(m: &Matrix<S>) -> Value {
    let entries: Vec<Value> = m
        .rows()
        .map(|row| Value::Array(row.iter().map(|x| x.to_json()).collect()))
        .collect();
    json!({ "n": m.n(), "entries": entries })
}

/// Reads the canonical form, or the compact form `[["i", "1"], ["-1", "2i"]]`
/// whose entries are complex literals, numbers, or `[re, im]` pairs.
pub fn matrix_from_json<S: Scalar>(value: &Value) -> Result<Matrix<S>, MatError> {
    if let Some(rows) = value.as_array() {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_array().ok_or_else(|| MatError::Parse("row must be an array".into()))?;
            if row.len() != n {
                return Err(MatError::Parse(format!("expected {n} columns, found {}", row.len())));
            }
            for x in row {
                data.push(match x {
                    Value::String(s) => parse_complex_literal(s)?,
                    Value::Number(_) => S::from_json(&json!([x, 0]))?,
                    _ => S::from_json(x)?,
                });
            }
        }
        return Matrix::from_vec(n, data);
    }
    let n = value
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| MatError::Parse("matrix needs an integer \"n\"".into()))? as usize;
    let rows = value
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| MatError::Parse("matrix needs \"entries\"".into()))?;
    if rows.len() != n {
        return Err(MatError::Parse(format!("expected {n} rows, found {}", rows.len())));
    }
    let mut data = Vec::with_capacity(n * n);
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| MatError::Parse("row must be an array".into()))?;
        if row.len() != n {
            return Err(MatError::Parse(format!("expected {n} columns, found {}", row.len())));
        }
        for x in row {
            data.push(S::from_json(x)?);
        }
    }
    Matrix::from_vec(n, data)
}

impl<S: Scalar> Serialize for Matrix<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        matrix_to_json(self).serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Matrix<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        matrix_from_json(&value).map_err(D::Error::custom)
    }
}
