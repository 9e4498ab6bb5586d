//! Fast smallest-eigenvalue evaluation for linear matrix families
//! `C(sum_i u_i M_i)`, where `C` is the identity or a partial transpose.
//!
//! Every section matrix is sparse: the generators touch at most a handful of
//! rows. The union of the nonzero patterns of the transformed directions
//! splits the index set into small connected components, and the spectrum of
//! any combination is the union of the spectra of those blocks. Blocks are
//! extracted once; each evaluation then solves a few tiny dense problems.

use crate::error::{Error, Result};
use crate::linalg::{connected_blocks, BlockScratch, HermitianMatrix, C64};
use crate::ptrans::TransposeSpec;
use crate::sections::SectionSpec;

#[derive(Clone, Debug)]
struct Block {
    size: usize,
    /// `arity` consecutive row-major `size x size` matrices.
    entries: Vec<C64>,
}

/// One condition (positivity of `rho` or of one partial transpose) over a
/// section, in block form.
#[derive(Clone, Debug)]
pub struct ConditionFamily {
    arity: usize,
    blocks: Vec<Block>,
    /// Some index is untouched by every direction, contributing eigenvalue 0.
    has_null_block: bool,
}

impl ConditionFamily {
    pub fn new(directions: &[HermitianMatrix], transform: Option<&TransposeSpec>) -> Result<Self> {
        let arity = directions.len();
        if arity == 0 {
            return Err(Error::invalid("a matrix family needs at least one direction"));
        }
        let n = directions[0].dim();
        let mats: Vec<HermitianMatrix> = match transform {
            Some(t) => directions.iter().map(|d| t.apply(d)).collect::<Result<_>>()?,
            None => directions.to_vec(),
        };
        let zero = C64::new(0.0, 0.0);
        let components = connected_blocks(n, |j, k| mats.iter().any(|m| m.get(j, k) != zero));
        let mut blocks = Vec::new();
        let mut has_null_block = false;
        for comp in components {
            let size = comp.len();
            let mut entries = Vec::with_capacity(arity * size * size);
            for m in &mats {
                for &r in &comp {
                    for &c in &comp {
                        entries.push(m.get(r, c));
                    }
                }
            }
            if entries.iter().all(|z| *z == zero) {
                has_null_block = true;
            } else {
                blocks.push(Block { size, entries });
            }
        }
        Ok(Self {
            arity,
            blocks,
            has_null_block,
        })
    }

    /// Smallest eigenvalue of `sum_i u_i C(M_i)`.
    pub fn min_eigenvalue(&self, u: &[f64], scratch: &mut BlockScratch) -> Result<f64> {
        debug_assert_eq!(u.len(), self.arity);
        let mut best = if self.has_null_block { 0.0 } else { f64::INFINITY };
        for b in &self.blocks {
            let kk = b.size * b.size;
            for x in 0..kk {
                let mut acc = C64::new(0.0, 0.0);
                for (i, &ui) in u.iter().enumerate() {
                    acc += b.entries[i * kk + x] * ui;
                }
                scratch.a[x] = acc;
            }
            best = best.min(scratch.min_eigenvalue(b.size)?);
        }
        Ok(best)
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.size).collect()
    }
}

/// Feasibility plus any number of partial-transpose conditions over one
/// section. Condition 0 is always positivity of `rho` itself.
#[derive(Clone, Debug)]
pub struct SectionPencil {
    n: usize,
    arity: usize,
    conditions: Vec<ConditionFamily>,
}

impl SectionPencil {
    pub fn new(spec: &SectionSpec, transposes: &[TransposeSpec]) -> Result<Self> {
        let dirs = spec.directions();
        let mut conditions = vec![ConditionFamily::new(&dirs, None)?];
        for t in transposes {
            if t.dim() != spec.n() {
                return Err(Error::invalid(format!(
                    "decomposition {t} does not factor n = {}",
                    spec.n()
                )));
            }
            conditions.push(ConditionFamily::new(&dirs, Some(t))?);
        }
        Ok(Self {
            n: spec.n(),
            arity: spec.arity(),
            conditions,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn condition_count(&self) -> usize {
        self.conditions.len()
    }

    pub fn condition(&self, k: usize) -> &ConditionFamily {
        &self.conditions[k]
    }

    /// Eigenvalue margin of condition `k` at coefficients `c`:
    /// `1/n + lambda_min(C_k(sum c_i M_i))`. Partial transposition fixes the
    /// identity, so the `I/n` part shifts every spectrum uniformly.
    pub fn margin(&self, k: usize, c: &[f64], scratch: &mut BlockScratch) -> Result<f64> {
        Ok(1.0 / self.n as f64 + self.conditions[k].min_eigenvalue(c, scratch)?)
    }

    /// Exit radius of condition `k` along direction `u` (not necessarily
    /// unit length): the matrices are traceless and nonzero, so the smallest
    /// eigenvalue `-mu` of the direction is negative and the ray leaves the
    /// region at `r = 1 / (n mu)`.
    pub fn exit_radius(&self, k: usize, u: &[f64], scratch: &mut BlockScratch) -> Result<f64> {
        let mu = -self.conditions[k].min_eigenvalue(u, scratch)?;
        if mu <= 0.0 {
            return Err(Error::BracketFailure { radius: f64::INFINITY });
        }
        Ok(1.0 / (self.n as f64 * mu))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn agrees_with_dense_solver() {
        let spec = SectionSpec::new(8, &[8, 35, 49]).unwrap();
        let ts = TransposeSpec::parse_list("4x2,2x4,mid222").unwrap();
        let pencil = SectionPencil::new(&spec, &ts).unwrap();
        let mut scratch = BlockScratch::default();
        for &c in &[[0.1, -0.2, 0.05], [-0.3, 0.0, 0.2], [0.0, 0.4, -0.4]] {
            let rho = spec.density(&c).unwrap();
            let dense = linalg::eigenvalues(&rho).unwrap()[0];
            assert!((pencil.margin(0, &c, &mut scratch).unwrap() - dense).abs() < 1e-13);
            for (k, t) in ts.iter().enumerate() {
                let dense = linalg::eigenvalues(&t.apply(&rho).unwrap()).unwrap()[0];
                let fast = pencil.margin(k + 1, &c, &mut scratch).unwrap();
                assert!((fast - dense).abs() < 1e-13, "{t}: {fast} vs {dense}");
            }
        }
    }

    #[test]
    fn exit_radius_of_3_6() {
        let spec = SectionSpec::pair(4, 3, 6).unwrap();
        let pencil = SectionPencil::new(&spec, &[]).unwrap();
        let mut s = BlockScratch::default();
        let r = pencil.exit_radius(0, &[-1.0, 0.0], &mut s).unwrap();
        assert!((r - 0.5).abs() < 1e-15);
    }

    #[test]
    fn blocks_are_small() {
        let spec = SectionSpec::pair(10, 33, 80).unwrap();
        let fam = ConditionFamily::new(&spec.directions(), None).unwrap();
        assert!(fam.block_sizes().iter().all(|&s| s <= 10));
        assert!(fam.has_null_block);
    }

    #[test]
    fn rejects_mismatched_decomposition() {
        let spec = SectionSpec::pair(6, 1, 2).unwrap();
        assert!(SectionPencil::new(&spec, &TransposeSpec::parse_list("2x2").unwrap()).is_err());
    }
}
