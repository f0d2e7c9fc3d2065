//! Shared JSON formats.
//!
//! Matrices are `{"dim": d, "re": [[..], ..], "im": [[..], ..]}` with
//! row-major `d x d` arrays. Vectors use the same object with flat length-`d`
//! arrays; a single-row nested array (`[[..]]`) is accepted on input.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{GleasonError, Result};
use crate::hilbert::{c, CMatrix, CVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let rows = |f: fn(&num_complex::Complex64) -> f64| {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        MatrixJson { dim: m.nrows(), re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

impl TryFrom<&MatrixJson> for CMatrix {
    type Error = GleasonError;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        let d = j.dim;
        let shape_ok = |a: &Vec<Vec<f64>>| a.len() == d && a.iter().all(|r| r.len() == d);
        if !shape_ok(&j.re) || !shape_ok(&j.im) {
            return Err(GleasonError::Parse(format!("matrix arrays are not {d}x{d}")));
        }
        Ok(CMatrix::from_fn(d, d, |r, k| c(j.re[r][k], j.im[r][k])))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&CVector> for VectorJson {
    fn from(v: &CVector) -> Self {
        VectorJson { dim: v.len(), re: v.iter().map(|z| z.re).collect(), im: v.iter().map(|z| z.im).collect() }
    }
}

impl TryFrom<&VectorJson> for CVector {
    type Error = GleasonError;

    fn try_from(j: &VectorJson) -> Result<Self> {
        if j.re.len() != j.dim || j.im.len() != j.dim {
            return Err(GleasonError::Parse(format!("vector arrays are not of length {}", j.dim)));
        }
        Ok(CVector::from_iterator(j.dim, j.re.iter().zip(&j.im).map(|(&a, &b)| c(a, b))))
    }
}

/// Reads a vector object, accepting flat or single-row nested arrays.
pub fn vector_from_value(v: &Value) -> Result<CVector> {
    fn flatten(v: Option<&Value>) -> Result<Vec<f64>> {
        let arr = v.and_then(Value::as_array).ok_or_else(|| GleasonError::Parse("missing re/im array".into()))?;
        let arr = match arr.as_slice() {
            [Value::Array(row)] => row,
            _ => arr,
        };
        arr.iter()
            .map(|x| x.as_f64().ok_or_else(|| GleasonError::Parse(format!("not a number: {x}"))))
            .collect()
    }
    let dim = v
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| GleasonError::Parse("missing dim".into()))? as usize;
    let j = VectorJson { dim, re: flatten(v.get("re"))?, im: flatten(v.get("im"))? };
    CVector::try_from(&j)
}

pub fn matrix_to_json(m: &CMatrix) -> String {
    serde_json::to_string_pretty(&MatrixJson::from(m)).expect("matrix serializes")
}

pub fn matrix_from_json(s: &str) -> Result<CMatrix> {
    let j: MatrixJson = serde_json::from_str(s)?;
    CMatrix::try_from(&j)
}
