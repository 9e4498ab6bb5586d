//! Minor-relaxation volumes of the full two-qubit state bodies.
//!
//! A 4x4 density matrix with diagonal `(a, b, c, d)` on the probability
//! simplex is relaxed to the set where every principal 2x2 minor is
//! nonnegative, i.e. `|rho_ij|^2 <= rho_ii rho_jj`. The relaxed body is
//! sampled exactly: the diagonal uniformly on the simplex (sorted-uniform
//! spacings), each off-diagonal uniformly on its allowed interval (real
//! case) or disk (complex case), and each sample carries the product of the
//! interval lengths / disk areas as its weight. The base volume therefore has
//! no rejection at all; extra constraints enter as indicators on the same
//! weighted stream.

mod qmc;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use qmc::{stream_rng, ShiftedRd};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    Real,
    Complex,
}

impl Case {
    /// Normalization factor applied to the relaxed volume.
    pub fn normalization(self) -> f64 {
        match self {
            Case::Real => 16.0,
            Case::Complex => 128.0,
        }
    }

    /// Real parameters per off-diagonal entry.
    fn components(self) -> usize {
        match self {
            Case::Real => 1,
            Case::Complex => 2,
        }
    }

    /// Dimension of the sampling cube: 3 for the diagonal plus the
    /// off-diagonal parameters.
    pub fn sample_dim(self) -> usize {
        3 + 6 * self.components()
    }
}

impl FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Case::Real),
            "complex" => Ok(Case::Complex),
            _ => Err(Error::invalid(format!("unknown case '{s}' (real|complex)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraints {
    /// All six principal 2x2 minors of rho nonnegative.
    Base,
    /// Additionally the two distinct new 2x2 minors of the partial transpose.
    Ppt,
    /// Base plus the first configured principal 3x3 minor.
    Refine1,
    /// Base plus the first two configured principal 3x3 minors.
    Refine2,
}

impl Constraints {
    pub const ALL: [Constraints; 4] = [
        Constraints::Base,
        Constraints::Ppt,
        Constraints::Refine1,
        Constraints::Refine2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Constraints::Base => "base",
            Constraints::Ppt => "ppt",
            Constraints::Refine1 => "refine1",
            Constraints::Refine2 => "refine2",
        }
    }
}

impl fmt::Display for Constraints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Constraints {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Constraints::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown constraint set '{s}' (base|ppt|refine1|refine2)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Randomly shifted R_d sequence; standard error from the spread of the
    /// independent shifts.
    QuasiRandom,
    /// Independent pseudo-random points; standard error from the sample
    /// variance.
    Plain,
}

#[derive(Clone, Debug)]
pub struct SamplerOptions {
    pub mode: SamplingMode,
    pub randomizations: usize,
    /// 1-based principal 3x3 minors used by `refine1` (first) and `refine2`
    /// (first two).
    pub refine_minors: Vec<[usize; 3]>,
    /// Worker threads (0 = rayon default).
    pub parallel: usize,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            mode: SamplingMode::QuasiRandom,
            randomizations: 32,
            refine_minors: vec![[1, 2, 4], [1, 3, 4]],
            parallel: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub case: Case,
    pub constraints: Constraints,
    pub mean: f64,
    pub standard_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub normalization: f64,
    pub randomizations: usize,
    pub mode: SamplingMode,
}

impl MCEstimate {
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.mean - reference) / self.standard_error
    }

    pub fn relative_error(&self) -> f64 {
        self.standard_error / self.mean.abs()
    }
}

/// Off-diagonal pairs in sampling order.
const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn pair_slot(i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    PAIRS.iter().position(|&p| p == (i, j)).expect("off-diagonal pair")
}

/// A sampled relaxed state: diagonal and upper off-diagonal entries.
struct Sample {
    diag: [f64; 4],
    off: [(f64, f64); 6],
}

impl Sample {
    fn entry(&self, i: usize, j: usize) -> (f64, f64) {
        if i == j {
            return (self.diag[i], 0.0);
        }
        let z = self.off[pair_slot(i, j)];
        if i < j {
            z
        } else {
            (z.0, -z.1)
        }
    }

    /// Determinant of the principal 3x3 submatrix on rows `s` (0-based).
    fn minor3(&self, s: [usize; 3]) -> f64 {
        let [i, j, k] = s;
        let (pi, pj, pk) = (self.diag[i], self.diag[j], self.diag[k]);
        let ij = self.entry(i, j);
        let jk = self.entry(j, k);
        let ki = self.entry(k, i);
        let n2 = |z: (f64, f64)| z.0 * z.0 + z.1 * z.1;
        // Re(ij * jk * ki)
        let p = (ij.0 * jk.0 - ij.1 * jk.1, ij.0 * jk.1 + ij.1 * jk.0);
        let re = p.0 * ki.0 - p.1 * ki.1;
        pi * pj * pk + 2.0 * re - pi * n2(jk) - pj * n2(ki) - pk * n2(ij)
    }

    /// The two new 2x2 minors of the partial transpose (0-based entries
    /// (1,2) against (0,3), and (0,3) against (1,2)).
    fn ppt(&self) -> bool {
        let n2 = |z: (f64, f64)| z.0 * z.0 + z.1 * z.1;
        n2(self.entry(1, 2)) <= self.diag[0] * self.diag[3] && n2(self.entry(0, 3)) <= self.diag[1] * self.diag[2]
    }
}

/// Maps a point of the unit cube to a relaxed state and its weight
/// (before normalization).
fn map_point(case: Case, u: &[f64]) -> (Sample, f64) {
    let mut cuts = [u[0], u[1], u[2]];
    cuts.sort_by(f64::total_cmp);
    let diag = [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], 1.0 - cuts[2]];
    let mut weight = 1.0 / 6.0;
    let mut off = [(0.0, 0.0); 6];
    for (slot, &(i, j)) in PAIRS.iter().enumerate() {
        let s = (diag[i] * diag[j]).sqrt();
        match case {
            Case::Real => {
                off[slot] = ((2.0 * u[3 + slot] - 1.0) * s, 0.0);
                weight *= 2.0 * s;
            }
            Case::Complex => {
                let rad = s * u[3 + 2 * slot].sqrt();
                let ang = 2.0 * PI * u[4 + 2 * slot];
                off[slot] = (rad * ang.cos(), rad * ang.sin());
                weight *= PI * s * s;
            }
        }
    }
    (Sample { diag, off }, weight)
}

fn indicators(sample: &Sample, minors: &[[usize; 3]]) -> [bool; 4] {
    let m = |k: usize| {
        minors
            .get(k)
            .map(|s| sample.minor3([s[0] - 1, s[1] - 1, s[2] - 1]) >= 0.0)
    };
    let r1 = m(0).unwrap_or(true);
    let r2 = r1 && m(1).unwrap_or(true);
    [true, sample.ppt(), r1, r2]
}

fn validate(samples: u64, opts: &SamplerOptions) -> Result<()> {
    if opts.randomizations < 2 {
        return Err(Error::invalid(
            "at least two randomizations are needed for an error estimate",
        ));
    }
    if samples < opts.randomizations as u64 {
        return Err(Error::invalid("fewer samples than randomizations"));
    }
    for s in &opts.refine_minors {
        let mut t = *s;
        t.sort_unstable();
        if t[0] == 0 || t[2] > 4 || t[0] == t[1] || t[1] == t[2] {
            return Err(Error::invalid(format!(
                "bad principal minor {s:?} (need three distinct indices in 1..=4)"
            )));
        }
    }
    Ok(())
}

/// Per-randomization sums over the four constraint sets:
/// (sum of weights, sum of squared weights) each.
fn run_randomization(case: Case, count: u64, seed: u64, index: u64, opts: &SamplerOptions) -> [(f64, f64); 4] {
    let mut rng = stream_rng(seed, index);
    let dim = case.sample_dim();
    let mut u = vec![0.0; dim];
    let mut acc = [(0.0, 0.0); 4];
    let mut seq = match opts.mode {
        SamplingMode::QuasiRandom => Some(ShiftedRd::new(dim, &mut rng)),
        SamplingMode::Plain => None,
    };
    for _ in 0..count {
        match seq.as_mut() {
            Some(s) => s.next_into(&mut u),
            None => u.iter_mut().for_each(|x| *x = rng.gen::<f64>()),
        }
        let (sample, w) = map_point(case, &u);
        let w = w * case.normalization();
        for (slot, hit) in indicators(&sample, &opts.refine_minors).into_iter().enumerate() {
            if hit {
                acc[slot].0 += w;
                acc[slot].1 += w * w;
            }
        }
    }
    acc
}

/// Estimates all four constraint sets from one shared sample stream.
pub fn minor_volumes(case: Case, samples: u64, seed: u64, opts: &SamplerOptions) -> Result<Vec<MCEstimate>> {
    validate(samples, opts)?;
    let r = opts.randomizations as u64;
    let counts: Vec<u64> = (0..r).map(|i| samples / r + u64::from(i < samples % r)).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.parallel)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let per_rand: Vec<[(f64, f64); 4]> = pool.install(|| {
        (0..r)
            .into_par_iter()
            .map(|i| run_randomization(case, counts[i as usize], seed, i, opts))
            .collect()
    });
    let out = Constraints::ALL
        .iter()
        .enumerate()
        .map(|(slot, &constraints)| {
            let (mean, se) = match opts.mode {
                SamplingMode::QuasiRandom => {
                    let means: Vec<f64> = per_rand
                        .iter()
                        .zip(&counts)
                        .map(|(a, &c)| a[slot].0 / c as f64)
                        .collect();
                    let m = means.iter().sum::<f64>() / r as f64;
                    let var = means.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (r as f64 - 1.0);
                    (m, (var / r as f64).sqrt())
                }
                SamplingMode::Plain => {
                    let s1: f64 = per_rand.iter().map(|a| a[slot].0).sum();
                    let s2: f64 = per_rand.iter().map(|a| a[slot].1).sum();
                    let n = samples as f64;
                    let m = s1 / n;
                    let var = (s2 / n - m * m) * n / (n - 1.0);
                    (m, (var.max(0.0) / n).sqrt())
                }
            };
            MCEstimate {
                case,
                constraints,
                mean,
                standard_error: se,
                samples,
                seed,
                normalization: case.normalization(),
                randomizations: opts.randomizations,
                mode: opts.mode,
            }
        })
        .collect();
    Ok(out)
}

pub fn minor_volume(case: Case, constraints: Constraints, samples: u64, seed: u64) -> Result<MCEstimate> {
    minor_volume_with(case, constraints, samples, seed, &SamplerOptions::default())
}

pub fn minor_volume_with(
    case: Case,
    constraints: Constraints,
    samples: u64,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<MCEstimate> {
    let all = minor_volumes(case, samples, seed, opts)?;
    Ok(all
        .into_iter()
        .find(|e| e.constraints == constraints)
        .expect("all sets estimated"))
}

/// Gamma function at `k / 2` for a positive integer `k`.
fn gamma_half(k: u32) -> f64 {
    if k.is_multiple_of(2) {
        (1..k / 2).map(f64::from).product()
    } else {
        // Gamma(1/2) = sqrt(pi), Gamma(x + 1) = x Gamma(x)
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < k as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Exact base volume from the Dirichlet integral over the simplex:
/// the weight is `2^6 (abcd)^(3/2)` (real) or `pi^6 (abcd)^3` (complex), so
/// the volume is `norm * c * Gamma(e)^4 / Gamma(4e)` with `e = 5/2` or `4`.
pub fn closed_form_base(case: Case) -> f64 {
    match case {
        Case::Real => 16.0 * 64.0 * gamma_half(5).powi(4) / gamma_half(20),
        Case::Complex => 128.0 * PI.powi(6) * gamma_half(8).powi(4) / gamma_half(32),
    }
}

pub fn closed_form_base_real() -> f64 {
    closed_form_base(Case::Real)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceConstants {
    pub real_base: f64,
    pub real_ppt: f64,
    pub real_refine1: f64,
    pub real_refine2: f64,
    pub real_hs_volume: f64,
    pub complex_base: f64,
    pub complex_ppt: f64,
    pub complex_hs_volume: f64,
    pub conjectured_separable_probability: f64,
}

pub fn reference_constants() -> ReferenceConstants {
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    ReferenceConstants {
        real_base: pi2 / 1120.0,
        real_ppt: 544.0 / 99225.0,
        real_refine1: pi2 * (16.0 + pi2) / 35840.0,
        real_refine2: pi4 / 26880.0,
        real_hs_volume: pi4 / 60480.0,
        complex_base: pi6 / 7_882_875.0,
        complex_ppt: 1964.0 * pi6 / 30_435_780_375.0,
        complex_hs_volume: pi6 / 851_350_500.0,
        conjectured_separable_probability: 4.0 * 3.0 * 49.0 * 11.0 * 13.0 * 3f64.sqrt() / (625.0 * pi6),
    }
}

/// The exact reference value for an estimate, where one exists.
pub fn reference_for(case: Case, constraints: Constraints) -> Option<f64> {
    let c = reference_constants();
    match (case, constraints) {
        (Case::Real, Constraints::Base) => Some(c.real_base),
        (Case::Real, Constraints::Ppt) => Some(c.real_ppt),
        (Case::Real, Constraints::Refine1) => Some(c.real_refine1),
        (Case::Real, Constraints::Refine2) => Some(c.real_refine2),
        (Case::Complex, Constraints::Base) => Some(c.complex_base),
        (Case::Complex, Constraints::Ppt) => Some(c.complex_ppt),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert!((closed_form_base_real() - PI * PI / 1120.0).abs() < 1e-17);
        assert!((closed_form_base(Case::Complex) - PI.powi(6) / 7_882_875.0).abs() < 1e-18);
        assert_eq!(gamma_half(2), 1.0);
        assert_eq!(gamma_half(10), 24.0);
        assert!((gamma_half(5) - 0.75 * PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn reference_decimals() {
        let c = reference_constants();
        assert!((c.real_hs_volume - 0.0016106).abs() < 5e-8);
        assert!((c.complex_hs_volume - 1.12925e-6).abs() < 5e-12);
        assert!((c.conjectured_separable_probability - 0.242379).abs() < 5e-7);
        assert!((c.real_hs_volume / c.real_base - 0.18277).abs() < 5e-6);
    }

    #[test]
    fn minor3_matches_cofactor_expansion() {
        let s = Sample {
            diag: [0.4, 0.3, 0.2, 0.1],
            off: [
                (0.1, 0.05),
                (0.02, -0.03),
                (0.01, 0.0),
                (0.04, 0.02),
                (-0.03, 0.01),
                (0.05, -0.02),
            ],
        };
        // explicit complex determinant of rows/cols {0, 1, 3}
        let e = |i, j| {
            let (re, im) = s.entry(i, j);
            num_complex::Complex64::new(re, im)
        };
        let idx = [0, 1, 3];
        let m = |a: usize, b: usize| e(idx[a], idx[b]);
        let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        assert!((s.minor3([0, 1, 3]) - det.re).abs() < 1e-15);
        assert!(det.im.abs() < 1e-15);
    }

    #[test]
    fn nesting_and_determinism() {
        let opts = SamplerOptions::default();
        let a = minor_volumes(Case::Real, 20_000, 3, &opts).unwrap();
        let b = minor_volumes(
            Case::Real,
            20_000,
            3,
            &SamplerOptions {
                parallel: 1,
                ..opts.clone()
            },
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(a[1].mean <= a[0].mean && a[2].mean <= a[0].mean && a[3].mean <= a[2].mean);
    }

    #[test]
    fn rejects_bad_options() {
        let bad = SamplerOptions {
            refine_minors: vec![[1, 1, 2]],
            ..Default::default()
        };
        assert!(minor_volumes(Case::Real, 1000, 1, &bad).is_err());
        assert!(minor_volumes(Case::Real, 10, 1, &SamplerOptions::default()).is_err());
        assert!("imaginary".parse::<Case>().is_err());
        assert_eq!("refine2".parse::<Constraints>().unwrap(), Constraints::Refine2);
    }
}
