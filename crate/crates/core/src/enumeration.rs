//! Equivalence classes of generator pairs.
//!
//! Every unordered pair `{a, b}` of generators gives a section with a
//! (total area, joint PPT area) signature. Pairs whose PPT region fills the
//! whole section are trivial; the others are grouped by signature.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ptrans::TransposeSpec;
use crate::regions::{self, RegionPredicate};
use crate::scenarios::AnalysisOptions;
use crate::sections::SectionSpec;

/// Relative tolerance under which `joint == total` marks a pair trivial.
pub const TRIVIAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct EnumerationOptions {
    /// Signature grouping tolerance of the coarse pass.
    pub coarse_tol: f64,
    /// Maximum spread of a class after recomputation at full accuracy.
    pub fine_tol: f64,
    /// Relative quadrature tolerance of the coarse pass.
    pub coarse_area_tol: f64,
    /// Worker threads (0 = rayon default).
    pub parallel: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            coarse_tol: 1e-5,
            fine_tol: 1e-6,
            coarse_area_tol: 1e-7,
            parallel: 0,
        }
    }
}

/// Measures of one pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSignature {
    pub pair: [usize; 2],
    pub total: f64,
    pub per_condition: Vec<f64>,
    pub joint: f64,
}

impl PairSignature {
    pub fn probability(&self) -> f64 {
        self.joint / self.total
    }

    pub fn is_trivial(&self) -> bool {
        self.joint >= self.total * (1.0 - TRIVIAL_TOL)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceClass {
    /// Lexicographically least member.
    pub representative: [usize; 2],
    pub count: usize,
    pub total: f64,
    pub joint: f64,
    pub probability: f64,
    /// Largest deviation of any member from the representative, at full
    /// accuracy.
    pub spread: f64,
    pub members: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassTable {
    pub n: usize,
    pub conditions: Vec<TransposeSpec>,
    /// Nontrivial classes, ordered by representative.
    pub classes: Vec<EquivalenceClass>,
    pub trivial_count: usize,
    pub total_pairs: usize,
    /// Coarse-pass signature of every pair, in pair order.
    #[serde(skip)]
    pub signatures: Vec<PairSignature>,
}

impl ClassTable {
    pub fn nontrivial_count(&self) -> usize {
        self.classes.iter().map(|c| c.count).sum()
    }

    pub fn class_of(&self, pair: [usize; 2]) -> Option<&EquivalenceClass> {
        let key = [pair[0].min(pair[1]), pair[0].max(pair[1])];
        self.classes.iter().find(|c| c.members.contains(&key))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["representative", "count", "total", "joint", "probability", "spread"])?;
        for c in &self.classes {
            out.write_record([
                format!("{};{}", c.representative[0], c.representative[1]),
                c.count.to_string(),
                format!("{:.12}", c.total),
                format!("{:.12}", c.joint),
                format!("{:.12}", c.probability),
                format!("{:.3e}", c.spread),
            ])?;
        }
        out.write_record([
            "trivial".to_string(),
            self.trivial_count.to_string(),
            String::new(),
            String::new(),
            "1".to_string(),
            String::new(),
        ])?;
        out.flush()?;
        Ok(())
    }
}

pub fn all_pairs(n: usize) -> Vec<[usize; 2]> {
    let m = n * n - 1;
    (1..=m).flat_map(|a| ((a + 1)..=m).map(move |b| [a, b])).collect()
}

fn signature(
    n: usize,
    pair: [usize; 2],
    conditions: &[TransposeSpec],
    area: &regions::quadrature::QuadOptions,
) -> Result<PairSignature> {
    let spec = SectionSpec::new(n, &pair)?;
    let pred = RegionPredicate::new(spec, conditions.to_vec())?;
    let m = regions::measure_2d(&pred, area, false)
        .map_err(|e| e.in_scenario(crate::scenarios::scenario_label(n, &pair, conditions)))?;
    Ok(PairSignature {
        pair,
        total: m.total,
        per_condition: m.per_condition,
        joint: m.joint,
    })
}

/// Groups signatures whose totals and joints agree within `tol`: first by
/// total (chained through the sorted list), then by joint inside each group.
fn cluster(sigs: &[&PairSignature], tol: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..sigs.len()).collect();
    order.sort_by(|&i, &j| {
        sigs[i]
            .total
            .total_cmp(&sigs[j].total)
            .then(sigs[i].pair.cmp(&sigs[j].pair))
    });
    let mut by_total: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match by_total.last_mut() {
            Some(g) if sigs[i].total - sigs[*g.last().unwrap()].total <= tol => g.push(i),
            _ => by_total.push(vec![i]),
        }
    }
    let mut out = Vec::new();
    for mut g in by_total {
        g.sort_by(|&i, &j| {
            sigs[i]
                .joint
                .total_cmp(&sigs[j].joint)
                .then(sigs[i].pair.cmp(&sigs[j].pair))
        });
        let mut cur: Vec<usize> = Vec::new();
        for i in g {
            if let Some(&last) = cur.last() {
                if sigs[i].joint - sigs[last].joint > tol {
                    out.push(std::mem::take(&mut cur));
                }
            }
            cur.push(i);
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    out
}

fn spread(sigs: &[PairSignature]) -> f64 {
    let r = &sigs[0];
    sigs.iter()
        .map(|s| (s.total - r.total).abs().max((s.joint - r.joint).abs()))
        .fold(0.0, f64::max)
}

fn run_parallel<T: Send, F>(parallel: usize, items: &[[usize; 2]], f: F) -> Result<Vec<T>>
where
    F: Fn([usize; 2]) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| items.par_iter().map(|&p| f(p)).collect())
}

pub fn enumerate_classes(n: usize, conditions: &[TransposeSpec], opts: &EnumerationOptions) -> Result<ClassTable> {
    if conditions.is_empty() {
        return Err(Error::invalid("at least one PPT condition is required"));
    }
    // validate n and the decompositions once, up front
    RegionPredicate::new(SectionSpec::pair(n, 1, 2)?, conditions.to_vec())?;

    let pairs = all_pairs(n);
    let coarse_area = AnalysisOptions::default().with_area_tol(opts.coarse_area_tol).area;
    let signatures: Vec<PairSignature> =
        run_parallel(opts.parallel, &pairs, |p| signature(n, p, conditions, &coarse_area))?;

    let nontrivial: Vec<&PairSignature> = signatures.iter().filter(|s| !s.is_trivial()).collect();
    let trivial_count = signatures.len() - nontrivial.len();
    let groups = cluster(&nontrivial, opts.coarse_tol);

    // Fine pass: recompute every nontrivial pair at full accuracy.
    let fine_area = AnalysisOptions::default().area;
    let fine_pairs: Vec<[usize; 2]> = nontrivial.iter().map(|s| s.pair).collect();
    let fine: Vec<PairSignature> =
        run_parallel(opts.parallel, &fine_pairs, |p| signature(n, p, conditions, &fine_area))?;
    let fine_of = |pair: [usize; 2]| -> &PairSignature {
        let i = fine_pairs.binary_search(&pair).expect("pair was recomputed");
        &fine[i]
    };

    let mut classes = Vec::new();
    for g in groups {
        let mut members: Vec<PairSignature> = g.iter().map(|&i| fine_of(nontrivial[i].pair).clone()).collect();
        members.sort_by_key(|a| a.pair);
        let mut parts = vec![members];
        if spread(&parts[0]) > opts.fine_tol {
            // split at the fine tolerance and retry once
            let refs: Vec<&PairSignature> = parts[0].iter().collect();
            let sub = cluster(&refs, opts.fine_tol);
            parts = sub
                .into_iter()
                .map(|idx| {
                    let mut v: Vec<PairSignature> = idx.iter().map(|&i| refs[i].clone()).collect();
                    v.sort_by_key(|a| a.pair);
                    v
                })
                .collect();
        }
        for part in parts {
            let s = spread(&part);
            if s > opts.fine_tol {
                return Err(Error::DegenerateClass {
                    representative: (part[0].pair[0], part[0].pair[1]),
                    spread: s,
                });
            }
            let rep = &part[0];
            classes.push(EquivalenceClass {
                representative: rep.pair,
                count: part.len(),
                total: rep.total,
                joint: rep.joint,
                probability: rep.probability(),
                spread: s,
                members: part.iter().map(|p| p.pair).collect(),
            });
        }
    }
    classes.sort_by_key(|a| a.representative);
    Ok(ClassTable {
        n,
        conditions: conditions.to_vec(),
        classes,
        trivial_count,
        total_pairs: pairs.len(),
        signatures,
    })
}
