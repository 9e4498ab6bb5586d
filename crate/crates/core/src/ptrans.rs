//! Partial transposition by index arithmetic.
//!
//! Two flavours:
//!
//! - `Block { p, q }`, label `"pxq"`: the matrix is viewed as a `q x q` array
//!   of `p x p` blocks and every block is transposed in place. `3x2` on a
//!   6x6 matrix transposes four 3x3 blocks; `2x3` transposes nine 2x2 blocks.
//! - `Multipartite { dims, subset }`: the basis is the product of factors of
//!   sizes `dims` (first factor most significant) and the factors listed in
//!   `subset` (1-based) are transposed. `mid222` is dims `(2,2,2)`, subset `{2}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, HermitianMatrix};
use crate::sections::SectionSpec;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransposeSpec {
    Block { p: usize, q: usize },
    Multipartite { dims: Vec<usize>, subset: Vec<usize> },
}

impl TransposeSpec {
    pub fn block(p: usize, q: usize) -> Result<Self> {
        if p < 2 || q < 2 {
            return Err(Error::invalid(format!(
                "block decomposition {p}x{q} needs factors >= 2"
            )));
        }
        Ok(TransposeSpec::Block { p, q })
    }

    pub fn multipartite(dims: &[usize], subset: &[usize]) -> Result<Self> {
        if dims.len() < 2 || dims.iter().any(|&d| d < 2) {
            return Err(Error::invalid(format!("bad factor dimensions {dims:?}")));
        }
        let mut s = subset.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != subset.len() || s.is_empty() || s.len() >= dims.len() {
            return Err(Error::invalid(format!(
                "subset {subset:?} must be a nonempty proper subset of 1..={}",
                dims.len()
            )));
        }
        if s.iter().any(|&k| k == 0 || k > dims.len()) {
            return Err(Error::invalid(format!(
                "subset {subset:?} out of range 1..={}",
                dims.len()
            )));
        }
        Ok(TransposeSpec::Multipartite {
            dims: dims.to_vec(),
            subset: s,
        })
    }

    /// Matrix dimension the decomposition applies to.
    pub fn dim(&self) -> usize {
        match self {
            TransposeSpec::Block { p, q } => p * q,
            TransposeSpec::Multipartite { dims, .. } => dims.iter().product(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            TransposeSpec::Block { p, q } => format!("{p}x{q}"),
            TransposeSpec::Multipartite { dims, subset } if dims == &[2, 2, 2] && subset == &[2] => {
                "mid222".to_string()
            }
            TransposeSpec::Multipartite { dims, subset } => {
                let d: Vec<String> = dims.iter().map(|x| x.to_string()).collect();
                let s: Vec<String> = subset.iter().map(|x| x.to_string()).collect();
                format!("multi:{}:{}", d.join("."), s.join("+"))
            }
        }
    }

    /// Parses a comma-separated list of labels.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        let out: Result<Vec<Self>> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect();
        let out = out?;
        if out.is_empty() {
            return Err(Error::invalid("empty decomposition list"));
        }
        Ok(out)
    }

    /// `map[r * n + c]` is the flat index of the input entry that lands at
    /// `(r, c)` of the partial transpose. The map is an involution.
    pub fn index_map(&self) -> Vec<usize> {
        let n = self.dim();
        let mut map = vec![0; n * n];
        match self {
            TransposeSpec::Block { p, .. } => {
                let p = *p;
                for r in 0..n {
                    for c in 0..n {
                        let (a, b1) = (r / p, r % p);
                        let (a2, b2) = (c / p, c % p);
                        map[r * n + c] = (p * a + b2) * n + p * a2 + b1;
                    }
                }
            }
            TransposeSpec::Multipartite { dims, subset } => {
                let m = dims.len();
                let mut strides = vec![1; m];
                for k in (0..m - 1).rev() {
                    strides[k] = strides[k + 1] * dims[k + 1];
                }
                for r in 0..n {
                    for c in 0..n {
                        let (mut r2, mut c2) = (r, c);
                        for &f in subset {
                            let k = f - 1;
                            let dr = (r / strides[k]) % dims[k];
                            let dc = (c / strides[k]) % dims[k];
                            r2 = r2 - dr * strides[k] + dc * strides[k];
                            c2 = c2 - dc * strides[k] + dr * strides[k];
                        }
                        map[r * n + c] = r2 * n + c2;
                    }
                }
            }
        }
        map
    }

    pub fn apply(&self, m: &HermitianMatrix) -> Result<HermitianMatrix> {
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: m.dim(),
            });
        }
        let src = m.entries();
        let data = self.index_map().into_iter().map(|i| src[i]).collect();
        Ok(HermitianMatrix::from_raw(m.dim(), data))
    }
}

impl fmt::Display for TransposeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for TransposeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "mid222" {
            return Self::multipartite(&[2, 2, 2], &[2]);
        }
        if let Some(rest) = t.strip_prefix("multi:") {
            let (dims, subset) = rest
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("expected multi:<dims>:<subset>, got '{t}'")))?;
            let dims = parse_numbers(dims, '.')?;
            let subset = parse_numbers(subset, '+')?;
            return Self::multipartite(&dims, &subset);
        }
        let parts: Vec<&str> = t.split(['x', 'X', '×']).collect();
        if parts.len() == 2 {
            let p = parts[0].trim().parse::<usize>();
            let q = parts[1].trim().parse::<usize>();
            if let (Ok(p), Ok(q)) = (p, q) {
                return Self::block(p, q);
            }
        }
        Err(Error::invalid(format!("unrecognised decomposition '{t}'")))
    }
}

fn parse_numbers(s: &str, sep: char) -> Result<Vec<usize>> {
    s.split(sep)
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("bad number '{x}' in decomposition")))
        })
        .collect()
}

impl Serialize for TransposeSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for TransposeSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn block_partial_transpose(m: &HermitianMatrix, p: usize, q: usize) -> Result<HermitianMatrix> {
    TransposeSpec::block(p, q)?.apply(m)
}

pub fn multipartite_partial_transpose(
    m: &HermitianMatrix,
    dims: &[usize],
    subset: &[usize],
) -> Result<HermitianMatrix> {
    TransposeSpec::multipartite(dims, subset)?.apply(m)
}

/// True iff the partial transpose of `density(c)` has no eigenvalue below `-tol`.
pub fn ppt(spec: &SectionSpec, c: &[f64], tspec: &TransposeSpec, tol: f64) -> Result<bool> {
    let pt = tspec.apply(&spec.density(c)?)?;
    Ok(linalg::min_eigenvalue(&pt)? >= -tol)
}
