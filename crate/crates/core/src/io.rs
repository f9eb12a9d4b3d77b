//! JSON file formats for operators and basis sets.
//!
//! Matrix file: `{"dims": [k, m], "data": [[re, im], …]}` with `(km)²` row-major entries.
//! Basis file: `{"dim": k, "bases": [[[[re, im], …k], …k rows], …]}`; each basis is a `k × k`
//! array whose columns are the basis vectors.
//!
//! Floats are written with shortest round-trip formatting, so `parse ∘ serialize` is lossless.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::CMatrix;
use crate::mub::{Basis, MubSet};
use crate::tensor::BipartiteOperator;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dims: [usize; 2],
    pub data: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFile {
    pub dim: usize,
    pub bases: Vec<Vec<Vec<[f64; 2]>>>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: [f64; 2], what: &str) -> Result<Complex64> {
    if !p[0].is_finite() || !p[1].is_finite() {
        return Err(Error::Parse(format!("{what}: non-finite entry")));
    }
    Ok(Complex64::new(p[0], p[1]))
}

impl MatrixFile {
    pub fn from_operator(a: &BipartiteOperator) -> Self {
        let (k, m) = a.dims();
        Self {
            dims: [k, m],
            data: a.matrix().as_slice().iter().map(|&z| pair(z)).collect(),
        }
    }

    pub fn to_operator(&self) -> Result<BipartiteOperator> {
        let [k, m] = self.dims;
        let n = k * m;
        if k == 0 || m == 0 {
            return Err(Error::DimensionMismatch(format!("dims [{k}, {m}] must be positive")));
        }
        if self.data.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "dims [{k}, {m}] need {} entries, file has {}",
                n * n,
                self.data.len()
            )));
        }
        let entries = self
            .data
            .iter()
            .enumerate()
            .map(|(i, &p)| complex(p, &format!("data[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        BipartiteOperator::new(k, m, CMatrix::from_row_major(n, n, entries)?)
    }
}

impl BasisFile {
    pub fn from_set(ms: &MubSet) -> Self {
        let bases = ms
            .bases
            .iter()
            .map(|b| {
                let cols = b.to_columns();
                (0..b.dim)
                    .map(|r| (0..b.dim).map(|c| pair(cols[(r, c)])).collect())
                    .collect()
            })
            .collect();
        Self { dim: ms.dim, bases }
    }

    pub fn from_basis(b: &Basis) -> Self {
        Self::from_set(&MubSet {
            dim: b.dim,
            bases: vec![b.clone()],
        })
    }

    pub fn to_set(&self) -> Result<MubSet> {
        let k = self.dim;
        if k == 0 {
            return Err(Error::DimensionMismatch("dim must be positive".into()));
        }
        if self.bases.is_empty() {
            return Err(Error::DimensionMismatch("no bases in file".into()));
        }
        let mut bases = Vec::with_capacity(self.bases.len());
        for (bi, rows) in self.bases.iter().enumerate() {
            if rows.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "bases[{bi}] has {} rows, expected {k}",
                    rows.len()
                )));
            }
            let mut m = CMatrix::zeros(k, k);
            for (r, row) in rows.iter().enumerate() {
                if row.len() != k {
                    return Err(Error::DimensionMismatch(format!(
                        "bases[{bi}][{r}] has {} entries, expected {k}",
                        row.len()
                    )));
                }
                for (c, &p) in row.iter().enumerate() {
                    m[(r, c)] = complex(p, &format!("bases[{bi}][{r}][{c}]"))?;
                }
            }
            bases.push(Basis::from_columns(&m)?);
        }
        MubSet::new(bases)
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

pub fn parse_matrix(text: &str) -> Result<BipartiteOperator> {
    parse_json::<MatrixFile>(text)?.to_operator()
}

pub fn parse_basis_set(text: &str) -> Result<MubSet> {
    parse_json::<BasisFile>(text)?.to_set()
}

pub fn serialize_matrix(a: &BipartiteOperator) -> String {
    to_json(&MatrixFile::from_operator(a))
}

pub fn serialize_basis_set(ms: &MubSet) -> String {
    to_json(&BasisFile::from_set(ms))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn read_matrix(path: &std::path::Path) -> Result<BipartiteOperator> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn read_basis_set(path: &std::path::Path) -> Result<MubSet> {
    parse_basis_set(&std::fs::read_to_string(path)?)
}
