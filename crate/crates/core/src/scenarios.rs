//! Full analysis of one pair or triad under a set of PPT conditions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ptrans::TransposeSpec;
use crate::regions::quadrature::QuadOptions;
use crate::regions::{
    self, boundary_partition_2d, interior_interface_2d, surface_area_3d, Measures, RegionPredicate, SphereOptions,
    SurfaceOptions,
};
use crate::sections::SectionSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionNote {
    PaperVerified,
    UnresolvedConvention,
}

impl ConventionNote {
    pub fn as_str(self) -> &'static str {
        match self {
            ConventionNote::PaperVerified => "paper_verified",
            ConventionNote::UnresolvedConvention => "unresolved_convention",
        }
    }
}

/// Boundary measures. For pairs these are Euclidean lengths in coefficient
/// coordinates; for triads, surface areas (and no interface).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub total_length: f64,
    /// Part of the feasible boundary inside the joint PPT region.
    pub classified_length: f64,
    pub boundary_probability: f64,
    /// Part of the joint PPT region's boundary strictly inside the feasible
    /// region.
    pub interior_length: Option<f64>,
    pub convention_note: ConventionNote,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub n: usize,
    pub gens: Vec<usize>,
    pub conditions: Vec<TransposeSpec>,
    pub total: f64,
    pub per_condition: Vec<f64>,
    pub joint: f64,
    pub probability: f64,
    pub error_estimate: f64,
    pub audit_deviation: Option<f64>,
    pub boundary: Option<BoundaryReport>,
    pub convention_note: ConventionNote,
}

pub const CSV_HEADER: [&str; 12] = [
    "n",
    "gens",
    "conditions",
    "total",
    "joint",
    "probability",
    "per_condition",
    "boundary_total",
    "boundary_classified",
    "boundary_probability",
    "interior",
    "convention",
];

fn fmt_f(x: f64) -> String {
    format!("{x:.12}")
}

impl ScenarioResult {
    pub fn spec(&self) -> Result<SectionSpec> {
        SectionSpec::new(self.n, &self.gens)
    }

    /// Gens joined by `;`, e.g. `3;6`.
    pub fn gens_key(&self) -> String {
        self.gens.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(";")
    }

    pub fn label(&self) -> String {
        scenario_label(self.n, &self.gens, &self.conditions)
    }

    /// One CSV record in the order of [`CSV_HEADER`].
    pub fn csv_record(&self) -> Vec<String> {
        let conds: Vec<String> = self.conditions.iter().map(|c| c.label()).collect();
        let per: Vec<String> = self.per_condition.iter().map(|&v| fmt_f(v)).collect();
        let b = self.boundary.as_ref();
        vec![
            self.n.to_string(),
            self.gens_key(),
            conds.join(";"),
            fmt_f(self.total),
            fmt_f(self.joint),
            fmt_f(self.probability),
            per.join(";"),
            b.map(|b| fmt_f(b.total_length)).unwrap_or_default(),
            b.map(|b| fmt_f(b.classified_length)).unwrap_or_default(),
            b.map(|b| fmt_f(b.boundary_probability)).unwrap_or_default(),
            b.and_then(|b| b.interior_length).map(fmt_f).unwrap_or_default(),
            b.map(|b| b.convention_note)
                .unwrap_or(self.convention_note)
                .as_str()
                .to_string(),
        ]
    }
}

pub fn scenario_label(n: usize, gens: &[usize], conditions: &[TransposeSpec]) -> String {
    let g: Vec<String> = gens.iter().map(|x| x.to_string()).collect();
    let c: Vec<String> = conditions.iter().map(|x| x.label()).collect();
    format!("n={n} {{{}}} [{}]", g.join(","), c.join(","))
}

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub area: QuadOptions,
    pub volume: SphereOptions,
    pub surface: SurfaceOptions,
    /// Target error of boundary polylines.
    pub boundary_target: f64,
    /// Run the doubled-resolution audit and fail when any measure moves by
    /// more than the tolerance below.
    pub audit: bool,
    pub audit_tol_2d: f64,
    pub audit_tol_3d: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            area: QuadOptions::default(),
            volume: SphereOptions::default(),
            surface: SurfaceOptions::default(),
            boundary_target: 1e-9,
            audit: true,
            audit_tol_2d: 1e-8,
            audit_tol_3d: 1e-5,
        }
    }
}

impl AnalysisOptions {
    /// Sets the relative area tolerance; the audit tolerance follows when
    /// the area tolerance is looser than it.
    pub fn with_area_tol(mut self, rel_tol: f64) -> Self {
        self.area.rel_tol = rel_tol;
        self.audit_tol_2d = self.audit_tol_2d.max(10.0 * rel_tol);
        self
    }
}

fn check_conditions(conditions: &[TransposeSpec]) -> Result<()> {
    if conditions.is_empty() {
        return Err(Error::invalid("at least one PPT condition is required"));
    }
    if conditions.len() > 6 {
        return Err(Error::invalid("at most six PPT conditions are supported"));
    }
    Ok(())
}

fn assemble(
    spec: &SectionSpec,
    conditions: &[TransposeSpec],
    m: Measures,
    audit_tol: Option<f64>,
) -> Result<ScenarioResult> {
    if let (Some(tol), Some(dev)) = (audit_tol, m.audit_deviation) {
        if dev > tol {
            return Err(Error::NonConvergence {
                what: "exactness audit",
                residual: dev,
            });
        }
    }
    let probability = if m.total > 0.0 {
        (m.joint / m.total).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(ScenarioResult {
        n: spec.n(),
        gens: spec.gens().to_vec(),
        conditions: conditions.to_vec(),
        total: m.total,
        per_condition: m.per_condition,
        joint: m.joint,
        probability,
        error_estimate: m.error_estimate,
        audit_deviation: m.audit_deviation,
        boundary: None,
        convention_note: ConventionNote::PaperVerified,
    })
}

pub fn analyze_pair(
    n: usize,
    pair: [usize; 2],
    conditions: &[TransposeSpec],
    with_boundary: bool,
) -> Result<ScenarioResult> {
    analyze_pair_with(n, pair, conditions, with_boundary, &AnalysisOptions::default())
}

pub fn analyze_pair_with(
    n: usize,
    pair: [usize; 2],
    conditions: &[TransposeSpec],
    with_boundary: bool,
    opts: &AnalysisOptions,
) -> Result<ScenarioResult> {
    let label = scenario_label(n, &pair, conditions);
    let run = || -> Result<ScenarioResult> {
        check_conditions(conditions)?;
        let spec = SectionSpec::new(n, &pair)?;
        let pred = RegionPredicate::new(spec.clone(), conditions.to_vec())?;
        let m = regions::measure_2d(&pred, &opts.area, opts.audit)?;
        let mut result = assemble(&spec, conditions, m, opts.audit.then_some(opts.audit_tol_2d))?;
        if with_boundary {
            let feasible = pred.feasible_part();
            let part = boundary_partition_2d(&feasible, &pred, opts.boundary_target)?;
            let interior = interior_interface_2d(&feasible, &pred, opts.boundary_target)?;
            result.boundary = Some(BoundaryReport {
                total_length: part.total_length,
                classified_length: part.classified_length,
                boundary_probability: part.classified_length / part.total_length,
                interior_length: Some(interior),
                convention_note: ConventionNote::UnresolvedConvention,
            });
        }
        Ok(result)
    };
    run().map_err(|e| e.in_scenario(label))
}

pub fn analyze_triad(
    n: usize,
    triad: [usize; 3],
    conditions: &[TransposeSpec],
    with_boundary_surface: bool,
) -> Result<ScenarioResult> {
    analyze_triad_with(n, triad, conditions, with_boundary_surface, &AnalysisOptions::default())
}

pub fn analyze_triad_with(
    n: usize,
    triad: [usize; 3],
    conditions: &[TransposeSpec],
    with_boundary_surface: bool,
    opts: &AnalysisOptions,
) -> Result<ScenarioResult> {
    let label = scenario_label(n, &triad, conditions);
    let run = || -> Result<ScenarioResult> {
        check_conditions(conditions)?;
        let spec = SectionSpec::new(n, &triad)?;
        let pred = RegionPredicate::new(spec.clone(), conditions.to_vec())?;
        let m = regions::measure_3d(&pred, &opts.volume, opts.audit)?;
        let mut result = assemble(&spec, conditions, m, opts.audit.then_some(opts.audit_tol_3d))?;
        if with_boundary_surface {
            let feasible = pred.feasible_part();
            let (total, classified) = surface_area_3d(&feasible, &pred, &opts.surface)?;
            result.boundary = Some(BoundaryReport {
                total_length: total,
                classified_length: classified,
                boundary_probability: classified / total,
                interior_length: None,
                convention_note: ConventionNote::UnresolvedConvention,
            });
        }
        Ok(result)
    };
    run().map_err(|e| e.in_scenario(label))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conds(s: &str) -> Vec<TransposeSpec> {
        TransposeSpec::parse_list(s).unwrap()
    }

    #[test]
    fn pair_order_does_not_matter() {
        let a = analyze_pair(4, [6, 15], &conds("2x2"), false).unwrap();
        let b = analyze_pair(4, [15, 6], &conds("2x2"), false).unwrap();
        assert_eq!(a, b);
        let want = (9.0 + 2.0 * 3f64.sqrt() * std::f64::consts::PI) / 24.0;
        assert!((a.probability - want).abs() < 1e-8);
    }

    #[test]
    fn errors_carry_scenario_identity() {
        let e = analyze_pair(4, [3, 3], &conds("2x2"), false).unwrap_err();
        assert!(e.to_string().contains("n=4 {3,3}"), "{e}");
        assert!(analyze_pair(4, [3, 6], &[], false).is_err());
        assert!(analyze_pair(6, [3, 6], &conds("2x2"), false).is_err());
    }

    #[test]
    fn csv_record_shape() {
        let r = analyze_pair(4, [3, 6], &conds("2x2"), true).unwrap();
        let rec = r.csv_record();
        assert_eq!(rec.len(), CSV_HEADER.len());
        assert_eq!(rec[1], "3;6");
        assert_eq!(rec[11], "unresolved_convention");
        assert!(r.boundary.unwrap().interior_length.unwrap() > 0.0);
    }
}
