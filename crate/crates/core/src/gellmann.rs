//! Generalized Gell-Mann generators of SU(n) in the standard numbering.
//!
//! Indices are grouped by level `m = 2..=n`. Level `m` contributes, in order,
//! `sym(1,m), asym(1,m), sym(2,m), asym(2,m), ..., sym(m-1,m), asym(m-1,m),
//! diag(m-1)` and ends at index `m^2 - 1`. Row/column labels below are
//! 1-based, matching the numbering.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;

pub const MAX_N: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// Ones at `(i, j)` and `(j, i)`, with `i < j`.
    Symmetric { i: usize, j: usize },
    /// `-i` at `(i, j)` and `+i` at `(j, i)`, with `i < j`.
    Antisymmetric { i: usize, j: usize },
    /// `sqrt(2/(d(d+1))) * diag(1, ..., 1, -d, 0, ...)` with `d` leading ones.
    Diagonal { d: usize },
}

/// A validated generator index `k` in `1..=n^2-1` for dimension `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorIndex {
    n: usize,
    k: usize,
}

impl GeneratorIndex {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        check_n(n)?;
        if k == 0 || k > n * n - 1 {
            return Err(Error::invalid(format!(
                "generator index {k} out of range 1..={} for n = {n}",
                n * n - 1
            )));
        }
        Ok(Self { n, k })
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn k(self) -> usize {
        self.k
    }

    pub fn kind(self) -> GeneratorKind {
        decode(self.k)
    }
}

fn check_n(n: usize) -> Result<()> {
    if !(2..=MAX_N).contains(&n) {
        return Err(Error::invalid(format!("n = {n} outside 2..={MAX_N}")));
    }
    Ok(())
}

/// Decodes a 1-based index into its generator type. Independent of `n`: the
/// numbering is nested, so index `k` means the same thing in every dimension
/// large enough to contain it.
pub fn decode(k: usize) -> GeneratorKind {
    debug_assert!(k >= 1);
    let mut m = 2;
    while m * m - 1 < k {
        m += 1;
    }
    let t = k - ((m - 1) * (m - 1) - 1) - 1;
    if t == 2 * (m - 1) {
        GeneratorKind::Diagonal { d: m - 1 }
    } else if t.is_multiple_of(2) {
        GeneratorKind::Symmetric { i: t / 2 + 1, j: m }
    } else {
        GeneratorKind::Antisymmetric { i: t / 2 + 1, j: m }
    }
}

/// Inverse of [`decode`].
pub fn encode(kind: GeneratorKind) -> usize {
    match kind {
        GeneratorKind::Symmetric { i, j } => (j - 1) * (j - 1) - 1 + 2 * (i - 1) + 1,
        GeneratorKind::Antisymmetric { i, j } => (j - 1) * (j - 1) - 1 + 2 * (i - 1) + 2,
        GeneratorKind::Diagonal { d } => (d + 1) * (d + 1) - 1,
    }
}

/// Nonzero entries `(row, col, value)` (0-based) of generator `k`.
pub fn sparse_entries(k: usize) -> Vec<(usize, usize, Complex64)> {
    match decode(k) {
        GeneratorKind::Symmetric { i, j } => vec![
            (i - 1, j - 1, Complex64::new(1.0, 0.0)),
            (j - 1, i - 1, Complex64::new(1.0, 0.0)),
        ],
        GeneratorKind::Antisymmetric { i, j } => vec![
            (i - 1, j - 1, Complex64::new(0.0, -1.0)),
            (j - 1, i - 1, Complex64::new(0.0, 1.0)),
        ],
        GeneratorKind::Diagonal { d } => {
            let s = (2.0 / (d * (d + 1)) as f64).sqrt();
            let mut out: Vec<_> = (0..d).map(|r| (r, r, Complex64::new(s, 0.0))).collect();
            out.push((d, d, Complex64::new(-(d as f64) * s, 0.0)));
            out
        }
    }
}

pub fn generator(n: usize, k: usize) -> Result<HermitianMatrix> {
    let idx = GeneratorIndex::new(n, k)?;
    let mut m = HermitianMatrix::zeros(n)?;
    for (r, c, v) in sparse_entries(idx.k) {
        if r <= c {
            m.set(r, c, v);
        }
    }
    Ok(m)
}

pub fn basis(n: usize) -> Result<Vec<HermitianMatrix>> {
    check_n(n)?;
    (1..n * n).map(|k| generator(n, k)).collect()
}
