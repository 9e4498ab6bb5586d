//! Hilbert-Schmidt geometry of two- and three-parameter sections of
//! n-level quantum state spaces.
//!
//! A section fixes all but two (or three) coefficients of the generalized
//! Bloch vector to zero:
//!
//! ```text
//! rho(c) = I/n + sum_i c_i * lambda_{a_i} / 2
//! ```
//!
//! where the `lambda_k` are the generalized Gell-Mann generators of SU(n).
//! The set of coefficients `c` giving a positive semidefinite `rho` is a
//! convex region containing the origin; so is every intersection of it with
//! positive-partial-transpose (PPT) conditions. The crate measures these
//! regions (areas, volumes, boundary lengths and surfaces), groups generator
//! pairs into equivalence classes, and estimates the minor-relaxation volumes
//! of the full two-qubit bodies by quasi-Monte-Carlo.
//!
//! Module map:
//!
//! - [`linalg`]: Hermitian matrices and eigenvalue solvers.
//! - [`gellmann`]: generator construction and index decoding.
//! - [`sections`]: section specs, density assembly and positivity.
//! - [`ptrans`]: partial transposition.
//! - [`family`]: fast spectral evaluation of affine matrix families.
//! - [`regions`]: areas, volumes, boundaries and surfaces of star-shaped regions.
//! - [`scenarios`]: full analysis of one pair or triad.
//! - [`enumeration`]: equivalence classes over all generator pairs.
//! - [`fullspace`]: quasi-Monte-Carlo minor-relaxation volumes.
//! - [`refdata`]: reference tables and the comparison engine.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod enumeration;
pub mod error;
pub mod family;
pub mod fullspace;
pub mod gellmann;
pub mod linalg;
pub mod ptrans;
pub mod refdata;
pub mod regions;
pub mod scenarios;
pub mod sections;

pub use error::{Error, Result};
pub use gellmann::{basis, generator, GeneratorIndex, GeneratorKind};
pub use linalg::{eigenvalues, min_eigenvalue, HermitianMatrix};
pub use ptrans::TransposeSpec;
pub use regions::{RegionPredicate, StarRegion};
pub use scenarios::{analyze_pair, analyze_triad, ScenarioResult};
pub use sections::SectionSpec;
