//! Dense Hermitian matrices (dimension at most 16) and their spectra.
//!
//! Two independent eigenvalue routes are provided:
//!
//! - [`eigenvalues`] runs cyclic Jacobi on the real-symmetric embedding
//!   `[[Re, -Im], [Im, Re]]` (or directly on the real part when the matrix is
//!   real). Every eigenvalue of the embedding appears twice and the sorted
//!   list is collapsed pairwise.
//! - [`min_eigenvalue`] splits the matrix into the connected components of
//!   its sparsity pattern and runs Householder tridiagonalization followed by
//!   implicit QL on each block. This is the hot path used by region probes.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const MAX_DIM: usize = 16;

const JACOBI_MAX_SWEEPS: usize = 64;
const JACOBI_REL_TOL: f64 = 1e-14;
const QL_MAX_ITER: usize = 64;

/// Complex Hermitian matrix stored densely in row-major order.
///
/// Every mutation writes both mirror entries, so `get(j, k) == get(k, j).conj()`
/// holds exactly at all times.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl HermitianMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::invalid(format!("matrix dimension {dim} outside 2..={MAX_DIM}")));
        }
        Ok(Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for j in 0..dim {
            m.data[j * dim + j] = C64::new(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (j, &v) in diag.iter().enumerate() {
            m.set_diagonal(j, v);
        }
        Ok(m)
    }

    /// Builds a matrix from a full row-major array, rejecting input that is
    /// not Hermitian to within `tol` (the stored matrix is the Hermitian part).
    pub fn from_row_major(dim: usize, entries: &[C64], tol: f64) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        for j in 0..dim {
            for k in j..dim {
                let a = entries[j * dim + k];
                let b = entries[k * dim + j].conj();
                if (a - b).norm() > tol {
                    return Err(Error::invalid(format!(
                        "entry ({j},{k}) breaks Hermiticity by {:e}",
                        (a - b).norm()
                    )));
                }
                m.set(j, k, (a + b) * 0.5);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> C64 {
        self.data[j * self.dim + k]
    }

    /// Sets entry `(j, k)` and its mirror. On the diagonal only the real part
    /// of `value` is kept.
    pub fn set(&mut self, j: usize, k: usize, value: C64) {
        let n = self.dim;
        if j == k {
            self.data[j * n + j] = C64::new(value.re, 0.0);
        } else {
            self.data[j * n + k] = value;
            self.data[k * n + j] = value.conj();
        }
    }

    pub fn set_diagonal(&mut self, j: usize, value: f64) {
        self.data[j * self.dim + j] = C64::new(value, 0.0);
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|j| self.data[j * self.dim + j].re).sum()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut data = self.data.clone();
        for j in 0..n {
            for k in 0..n {
                data[j * n + k] = self.data[k * n + j];
            }
        }
        Self { dim: n, data }
    }

    /// `self += alpha * other`.
    pub fn scale_add(&mut self, alpha: f64, other: &HermitianMatrix) -> Result<()> {
        self.check_same_dim(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * alpha;
        }
        Ok(())
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * alpha).collect(),
        }
    }

    /// Trace of the matrix product `self * other` (real for Hermitian inputs).
    pub fn trace_product(&self, other: &HermitianMatrix) -> Result<f64> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                acc += self.data[j * n + k] * other.data[k * n + j];
            }
        }
        Ok(acc.re)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_same_dim(&self, other: &HermitianMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// Builds a matrix from raw storage that is Hermitian by construction.
    pub(crate) fn from_raw(dim: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }
}

/// All eigenvalues in ascending order, by cyclic Jacobi.
pub fn eigenvalues(m: &HermitianMatrix) -> Result<Vec<f64>> {
    Ok(jacobi_route(m, false)?.0)
}

/// Eigenvalues (ascending) with orthonormal eigenvectors.
///
/// `vectors[i]` is the eigenvector of `values[i]`, as a length-`dim` column.
pub fn eigh(m: &HermitianMatrix) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let (values, vectors) = jacobi_route(m, true)?;
    Ok((values, vectors.expect("vectors requested")))
}

/// Smallest eigenvalue.
///
/// Uses the block-diagonal structure of the matrix and a tridiagonal QL
/// solver per block; agrees with `eigenvalues(m)[0]` to rounding error.
pub fn min_eigenvalue(m: &HermitianMatrix) -> Result<f64> {
    let n = m.dim;
    let blocks = connected_blocks(n, |j, k| m.get(j, k) != C64::new(0.0, 0.0));
    let mut best = f64::INFINITY;
    let mut scratch = BlockScratch::default();
    for block in &blocks {
        let k = block.len();
        for (a, &ja) in block.iter().enumerate() {
            for (b, &jb) in block.iter().enumerate() {
                scratch.a[a * k + b] = m.get(ja, jb);
            }
        }
        best = best.min(scratch.min_eigenvalue(k)?);
    }
    Ok(best)
}

/// Groups indices `0..n` into connected components of the graph whose edges
/// are the pairs `(j, k)` with `linked(j, k)`. Components are returned sorted
/// by their smallest index, each sorted ascending.
pub(crate) fn connected_blocks(n: usize, linked: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for j in 0..n {
        for k in (j + 1)..n {
            if linked(j, k) {
                let (a, b) = (find(&mut parent, j), find(&mut parent, k));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for j in 0..n {
        let root = find(&mut parent, j);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[root]].push(j);
    }
    blocks
}

/// Fixed-capacity workspace for dense eigenvalue problems of size <= 16.
/// Create one per worker thread and reuse it across evaluations.
#[derive(Clone)]
pub struct BlockScratch {
    pub(crate) a: [C64; MAX_DIM * MAX_DIM],
    d: [f64; MAX_DIM],
    e: [f64; MAX_DIM],
    v: [C64; MAX_DIM],
    p: [C64; MAX_DIM],
}

impl Default for BlockScratch {
    fn default() -> Self {
        Self {
            a: [C64::new(0.0, 0.0); MAX_DIM * MAX_DIM],
            d: [0.0; MAX_DIM],
            e: [0.0; MAX_DIM],
            v: [C64::new(0.0, 0.0); MAX_DIM],
            p: [C64::new(0.0, 0.0); MAX_DIM],
        }
    }
}

impl BlockScratch {
    /// Smallest eigenvalue of the Hermitian `k x k` matrix held row-major in
    /// `self.a`. Destroys `self.a`.
    pub(crate) fn min_eigenvalue(&mut self, k: usize) -> Result<f64> {
        match k {
            0 => Ok(f64::INFINITY),
            1 => Ok(self.a[0].re),
            2 => {
                let (p, q, r) = (self.a[0].re, self.a[3].re, self.a[1].norm());
                let mean = 0.5 * (p + q);
                let half = 0.5 * (p - q);
                Ok(mean - half.hypot(r))
            }
            _ => {
                self.tridiagonalize(k);
                tql_eigenvalues(&mut self.d[..k], &mut self.e[..k])?;
                Ok(self.d[..k].iter().copied().fold(f64::INFINITY, f64::min))
            }
        }
    }

    /// Householder reduction of `self.a` (k x k, Hermitian) to a real
    /// symmetric tridiagonal matrix with diagonal `d` and subdiagonal `e`.
    fn tridiagonalize(&mut self, k: usize) {
        let a = &mut self.a;
        for col in 0..k.saturating_sub(2) {
            let lo = col + 1;
            let xnorm = (lo..k).map(|i| a[i * k + col].norm_sqr()).sum::<f64>().sqrt();
            if xnorm == 0.0 {
                self.e[col] = 0.0;
                continue;
            }
            let x0 = a[lo * k + col];
            let phase = if x0.norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                x0 / x0.norm()
            };
            let alpha = -phase * xnorm;
            let m = k - lo;
            let v = &mut self.v[..m];
            v[0] = x0 - alpha;
            for i in 1..m {
                v[i] = a[(lo + i) * k + col];
            }
            let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if vnorm == 0.0 {
                self.e[col] = xnorm;
                continue;
            }
            for z in v.iter_mut() {
                *z /= vnorm;
            }
            // p = T v on the trailing block
            let p = &mut self.p[..m];
            for i in 0..m {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..m {
                    acc += a[(lo + i) * k + lo + j] * v[j];
                }
                p[i] = acc;
            }
            let kk: f64 = v.iter().zip(p.iter()).map(|(vi, pi)| (vi.conj() * pi).re).sum();
            for i in 0..m {
                p[i] -= v[i] * kk;
            }
            for i in 0..m {
                for j in 0..m {
                    a[(lo + i) * k + lo + j] -= (v[i] * p[j].conj() + p[i] * v[j].conj()) * 2.0;
                }
            }
            a[lo * k + col] = alpha;
            a[col * k + lo] = alpha.conj();
            for i in (lo + 1)..k {
                a[i * k + col] = C64::new(0.0, 0.0);
                a[col * k + i] = C64::new(0.0, 0.0);
            }
            self.e[col] = xnorm;
        }
        for i in 0..k {
            self.d[i] = a[i * k + i].re;
        }
        if k >= 2 {
            self.e[k - 2] = a[(k - 1) * k + k - 2].norm();
        }
        self.e[k - 1] = 0.0;
    }
}

/// Implicit QL with Wilkinson-style shifts on a real symmetric tridiagonal
/// matrix. `e[i]` couples `d[i]` and `d[i + 1]`; `e[n - 1]` is ignored.
/// On return `d` holds the (unsorted) eigenvalues.
fn tql_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::NonConvergence {
                    what: "tridiagonal QL",
                    residual: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Cyclic Jacobi on a real symmetric `m x m` matrix (row-major, destroyed).
/// Returns unsorted eigenvalues and, if requested, eigenvector columns
/// (row-major `m x m`, column `i` belongs to eigenvalue `i`).
fn jacobi_symmetric(a: &mut [f64], m: usize, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let mut v = want_vectors.then(|| {
        let mut v = vec![0.0; m * m];
        for i in 0..m {
            v[i * m + i] = 1.0;
        }
        v
    });
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for p in 0..m {
            for q in 0..m {
                if p != q {
                    s += a[p * m + q] * a[p * m + q];
                }
            }
        }
        s.sqrt()
    };
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(a) <= JACOBI_REL_TOL * norm {
            converged = true;
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
                a[p * m + q] = 0.0;
                a[q * m + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..m {
                        let vkp = v[k * m + p];
                        let vkq = v[k * m + q];
                        v[k * m + p] = c * vkp - s * vkq;
                        v[k * m + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    if !converged {
        let residual = off_norm(a);
        if residual > JACOBI_REL_TOL * norm {
            return Err(Error::NonConvergence {
                what: "cyclic Jacobi",
                residual,
            });
        }
    }
    Ok(((0..m).map(|i| a[i * m + i]).collect(), v))
}

type Spectrum = (Vec<f64>, Option<Vec<Vec<C64>>>);

fn jacobi_route(m: &HermitianMatrix, want_vectors: bool) -> Result<Spectrum> {
    let n = m.dim;
    if m.is_real() {
        let mut a: Vec<f64> = m.data.iter().map(|z| z.re).collect();
        let (vals, vecs) = jacobi_symmetric(&mut a, n, want_vectors)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        let values = order.iter().map(|&i| vals[i]).collect();
        let vectors = vecs.map(|v| {
            order
                .iter()
                .map(|&i| (0..n).map(|r| C64::new(v[r * n + i], 0.0)).collect())
                .collect()
        });
        return Ok((values, vectors));
    }

    let big = 2 * n;
    let mut a = vec![0.0; big * big];
    for j in 0..n {
        for k in 0..n {
            let z = m.get(j, k);
            a[j * big + k] = z.re;
            a[(j + n) * big + k + n] = z.re;
            a[j * big + k + n] = -z.im;
            a[(j + n) * big + k] = z.im;
        }
    }
    let (vals, vecs) = jacobi_symmetric(&mut a, big, want_vectors)?;
    let mut order: Vec<usize> = (0..big).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let values: Vec<f64> = (0..n)
        .map(|i| 0.5 * (vals[order[2 * i]] + vals[order[2 * i + 1]]))
        .collect();

    let Some(v) = vecs else {
        return Ok((values, None));
    };
    // Each doubled eigenvalue carries a two-dimensional real eigenspace that
    // is one complex line; degenerate complex eigenvalues merge further.
    // Group clusters, then pick an orthonormal complex basis of each.
    let scale = m.frobenius_norm().max(1.0);
    let mut clusters: Vec<(usize, usize)> = Vec::new(); // (first pair, pair count)
    for i in 0..n {
        match clusters.last_mut() {
            Some((start, len)) if (values[i] - values[*start + *len - 1]).abs() <= 1e-9 * scale => {
                *len += 1;
            }
            _ => clusters.push((i, 1)),
        }
    }
    let mut vectors: Vec<Vec<C64>> = Vec::with_capacity(n);
    for &(start, len) in &clusters {
        let mut candidates: Vec<Vec<C64>> = (2 * start..2 * (start + len))
            .map(|slot| {
                let col = order[slot];
                (0..n)
                    .map(|r| C64::new(v[r * big + col], v[(r + n) * big + col]))
                    .collect()
            })
            .collect();
        let mut chosen: Vec<Vec<C64>> = Vec::with_capacity(len);
        for _ in 0..len {
            let (best, _) = candidates
                .iter()
                .enumerate()
                .map(|(i, c)| (i, c.iter().map(|z| z.norm_sqr()).sum::<f64>()))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            let mut pick = candidates.swap_remove(best);
            let nrm = pick.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in pick.iter_mut() {
                *z /= nrm;
            }
            for c in candidates.iter_mut() {
                let overlap: C64 = pick.iter().zip(c.iter()).map(|(p, x)| p.conj() * x).sum();
                for (x, p) in c.iter_mut().zip(&pick) {
                    *x -= p * overlap;
                }
            }
            chosen.push(pick);
        }
        vectors.extend(chosen);
    }
    Ok((values, Some(vectors)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_quarter() {
        let m = HermitianMatrix::identity(4).unwrap().scaled(0.25);
        assert_eq!(eigenvalues(&m).unwrap(), vec![0.25; 4]);
        assert_eq!(min_eigenvalue(&m).unwrap(), 0.25);
    }

    #[test]
    fn pauli_z() {
        let m = HermitianMatrix::from_diagonal(&[1.0, -1.0]).unwrap();
        assert_eq!(eigenvalues(&m).unwrap(), vec![-1.0, 1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let mut m = HermitianMatrix::from_diagonal(&[0.3, 0.7]).unwrap();
        m.set(0, 1, c(0.5, 0.0));
        let expected = 0.5 - (0.04f64 + 0.25).sqrt();
        assert!((min_eigenvalue(&m).unwrap() - expected).abs() < 1e-15);
        assert!((eigenvalues(&m).unwrap()[0] - expected).abs() < 1e-14);
        assert!((expected + 0.038516).abs() < 1e-6);
    }

    #[test]
    fn setter_keeps_mirror() {
        let mut m = HermitianMatrix::zeros(3).unwrap();
        m.set(0, 2, c(1.0, -2.0));
        m.set(1, 1, c(4.0, 9.0));
        assert_eq!(m.get(2, 0), c(1.0, 2.0));
        assert_eq!(m.get(1, 1), c(4.0, 0.0));
    }

    #[test]
    fn dimension_bounds() {
        assert!(HermitianMatrix::zeros(1).is_err());
        assert!(HermitianMatrix::zeros(17).is_err());
        assert!(HermitianMatrix::zeros(16).is_ok());
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let e = [c(1.0, 0.0), c(1.0, 1.0), c(1.0, 1.0), c(0.0, 0.0)];
        assert!(HermitianMatrix::from_row_major(2, &e, 1e-12).is_err());
    }

    #[test]
    fn tridiagonal_handles_block_diagonal_and_zero() {
        let z = HermitianMatrix::zeros(5).unwrap();
        assert_eq!(min_eigenvalue(&z).unwrap(), 0.0);
        let mut m = HermitianMatrix::from_diagonal(&[3.0, 1.0, 2.0, -1.0, 0.5]).unwrap();
        m.set(0, 4, c(0.0, 1.0));
        m.set(1, 3, c(2.0, 0.0));
        let all = eigenvalues(&m).unwrap();
        assert!((min_eigenvalue(&m).unwrap() - all[0]).abs() < 1e-13);
    }

    #[test]
    fn degenerate_complex_eigenvectors_are_orthonormal() {
        // diag(1,1,2) conjugated by a complex unitary keeps a doubly
        // degenerate eigenvalue.
        let mut m = HermitianMatrix::from_diagonal(&[1.5, 1.5, 1.0]).unwrap();
        m.set(0, 1, c(0.0, 0.5));
        let (vals, vecs) = eigh(&m).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        for a in 0..3 {
            for b in 0..3 {
                let ip: C64 = vecs[a].iter().zip(&vecs[b]).map(|(x, y)| x.conj() * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - c(want, 0.0)).norm() < 1e-10, "{a} {b} {ip}");
            }
        }
    }
}
