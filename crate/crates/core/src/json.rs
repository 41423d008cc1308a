//! Wire formats shared by the library types and the command-line tool.
//!
//! Complex numbers travel as `[re, im]`; purely real entries may be written
//! as `[re]`. Matrices are `{"dim": d, "entries": [[z, ...], ...]}` in
//! row-major order.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::C64;

/// A complex number in its JSON form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexJson(pub C64);

impl Serialize for ComplexJson {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexJson {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<f64>::deserialize(deserializer)?;
        match parts.as_slice() {
            [re] => Ok(ComplexJson(C64::new(*re, 0.0))),
            [re, im] => Ok(ComplexJson(C64::new(*re, *im))),
            other => Err(serde::de::Error::custom(format!(
                "complex entry must be [re] or [re, im], got {} components",
                other.len()
            ))),
        }
    }
}

/// Raw square complex matrix, before any structural validation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<ComplexJson>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &DMatrix<C64>) -> Self {
        let entries = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| ComplexJson(m[(r, c)])).collect())
            .collect();
        MatrixJson {
            dim: m.nrows(),
            entries,
        }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        if self.entries.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.entries.len(),
            });
        }
        let mut m = DMatrix::zeros(d, d);
        for (r, row) in self.entries.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            for (c, z) in row.iter().enumerate() {
                m[(r, c)] = z.0;
            }
        }
        Ok(m)
    }
}

pub fn vector_to_json(v: &DVector<C64>) -> Vec<ComplexJson> {
    v.iter().copied().map(ComplexJson).collect()
}

pub fn vector_from_json(v: &[ComplexJson]) -> DVector<C64> {
    DVector::from_iterator(v.len(), v.iter().map(|z| z.0))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}
