//! Two- and three-parameter sections `rho(c) = I/n + sum_i c_i lambda_{a_i} / 2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gellmann::{self, GeneratorKind};
use crate::linalg::{self, HermitianMatrix};

pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-10;

/// A section of the n-level state space spanned by 2 or 3 generators.
/// Generators are kept sorted ascending, so `{a, b}` and `{b, a}` are the
/// same section.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectionSpec {
    n: usize,
    gens: Vec<usize>,
}

impl SectionSpec {
    pub fn new(n: usize, gens: &[usize]) -> Result<Self> {
        if !(2..=3).contains(&gens.len()) {
            return Err(Error::invalid(format!(
                "a section needs 2 or 3 generators, got {}",
                gens.len()
            )));
        }
        for &k in gens {
            gellmann::GeneratorIndex::new(n, k)?;
        }
        let mut sorted = gens.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("duplicate generator indices in {gens:?}")));
        }
        Ok(Self { n, gens: sorted })
    }

    pub fn pair(n: usize, a: usize, b: usize) -> Result<Self> {
        Self::new(n, &[a, b])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[usize] {
        &self.gens
    }

    pub fn arity(&self) -> usize {
        self.gens.len()
    }

    /// True when no generator is antisymmetric, so every density in the
    /// section is a real symmetric matrix.
    pub fn is_real(&self) -> bool {
        self.gens
            .iter()
            .all(|&k| !matches!(gellmann::decode(k), GeneratorKind::Antisymmetric { .. }))
    }

    /// The direction matrices `lambda_{a_i} / 2`.
    pub fn directions(&self) -> Vec<HermitianMatrix> {
        self.gens
            .iter()
            .map(|&k| gellmann::generator(self.n, k).expect("validated").scaled(0.5))
            .collect()
    }

    pub fn density(&self, c: &[f64]) -> Result<HermitianMatrix> {
        if c.len() != self.arity() {
            return Err(Error::DimensionMismatch {
                expected: self.arity(),
                found: c.len(),
            });
        }
        let mut rho = HermitianMatrix::identity(self.n)?.scaled(1.0 / self.n as f64);
        for (&ci, dir) in c.iter().zip(self.directions()) {
            rho.scale_add(ci, &dir)?;
        }
        Ok(rho)
    }

    /// True iff the smallest eigenvalue of `density(c)` is at least `-tol`.
    pub fn feasible(&self, c: &[f64], tol: f64) -> Result<bool> {
        Ok(linalg::min_eigenvalue(&self.density(c)?)? >= -tol)
    }

    /// Braced label such as `{3,6}`.
    pub fn label(&self) -> String {
        let inner: Vec<String> = self.gens.iter().map(|k| k.to_string()).collect();
        format!("{{{}}}", inner.join(","))
    }
}

impl fmt::Display for SectionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} {}", self.n, self.label())
    }
}

/// Radius of the ball `tr rho^2 <= 1`, i.e. `1/n + |c|^2/2 <= 1`, which
/// contains every state of every section.
pub fn bounding_radius(n: usize) -> f64 {
    (2.0 * (n as f64 - 1.0) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_maximally_mixed() {
        let s = SectionSpec::pair(6, 13, 1).unwrap();
        assert_eq!(s.gens(), &[1, 13]);
        let rho = s.density(&[0.0, 0.0]).unwrap();
        let want = HermitianMatrix::identity(6).unwrap().scaled(1.0 / 6.0);
        assert_eq!(rho, want);
        assert!((linalg::min_eigenvalue(&rho).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn coefficients_recovered_by_trace() {
        let s = SectionSpec::new(4, &[1, 4, 6]).unwrap();
        let c = [0.1, -0.2, 0.3];
        let rho = s.density(&c).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        for (i, &k) in s.gens().iter().enumerate() {
            let g = gellmann::generator(4, k).unwrap();
            assert!((rho.trace_product(&g).unwrap() - c[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_spectrum_3_6() {
        let s = SectionSpec::pair(4, 3, 6).unwrap();
        for &(x, y) in &[(0.1, 0.2), (-0.3, 0.05), (0.4, -0.25)] {
            let ev = linalg::eigenvalues(&s.density(&[x, y]).unwrap()).unwrap();
            let root = (x * x / 16.0 + y * y / 4.0f64).sqrt();
            let mut want = [0.25 + x / 2.0, 0.25, 0.25 - x / 4.0 + root, 0.25 - x / 4.0 - root];
            want.sort_by(f64::total_cmp);
            for (a, b) in ev.iter().zip(want) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn feasibility_examples() {
        let s = SectionSpec::pair(4, 3, 6).unwrap();
        assert!(s.feasible(&[0.0, 0.0], DEFAULT_FEASIBILITY_TOL).unwrap());
        assert!(!s.feasible(&[0.6, 0.0], DEFAULT_FEASIBILITY_TOL).unwrap());
        let rho = s.density(&[0.5, 0.0]).unwrap();
        assert!(linalg::min_eigenvalue(&rho).unwrap().abs() < 1e-15);
        let sq = SectionSpec::pair(6, 1, 13).unwrap();
        assert!(sq.feasible(&[1.0 / 3.0, 1.0 / 3.0], DEFAULT_FEASIBILITY_TOL).unwrap());
        assert!(!sq.feasible(&[0.34, 0.0], DEFAULT_FEASIBILITY_TOL).unwrap());
    }

    #[test]
    fn validation() {
        assert!(SectionSpec::pair(4, 3, 3).is_err());
        assert!(SectionSpec::pair(4, 3, 16).is_err());
        assert!(SectionSpec::new(4, &[1]).is_err());
        assert!(SectionSpec::new(4, &[1, 2, 3, 4]).is_err());
        let s = SectionSpec::pair(4, 3, 6).unwrap();
        assert!(s.density(&[0.1]).is_err());
    }

    #[test]
    fn bounding_radii() {
        assert_eq!(bounding_radius(2), 1.0);
        assert!((bounding_radius(4) - 1.5f64.sqrt()).abs() < 1e-15);
    }
}
