//! Measures of convex regions cut out of a section by positivity and PPT
//! conditions.
//!
//! Every region here is convex and contains the origin strictly inside, so
//! it is described completely by its radial function `r(u)`: the distance
//! from the origin to the boundary along the unit direction `u`. Areas and
//! volumes are then one- and two-dimensional integrals,
//!
//! ```text
//! A = 1/2 * integral r(theta)^2 dtheta
//! V = 1/3 * integral r(omega)^3 domega
//! ```
//!
//! computed with shared adaptive Gauss-Kronrod panels for all conditions at
//! once.

mod boundary;
pub mod quadrature;
mod surface;

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use boundary::{
    boundary_partition_2d, boundary_polyline_2d, interface_partition_2d, interior_interface_2d, BoundaryArc, Partition,
    RadialProfile,
};
pub use surface::{surface_area_3d, SurfaceOptions};

use crate::error::{Error, Result};
use crate::family::SectionPencil;
use crate::linalg::BlockScratch;
use crate::ptrans::TransposeSpec;
use crate::sections::{bounding_radius, SectionSpec, DEFAULT_FEASIBILITY_TOL};
use quadrature::{QuadOptions, QuadResult};

pub const BISECTION_TOL: f64 = 1e-12;
pub const BOUNDARY_TOL: f64 = 1e-9;
pub const INTERIOR_TOL: f64 = 1e-8;

thread_local! {
    static SCRATCH: RefCell<BlockScratch> = RefCell::new(BlockScratch::default());
}

pub(crate) fn with_scratch<T>(f: impl FnOnce(&mut BlockScratch) -> T) -> T {
    SCRATCH.with(|s| f(&mut s.borrow_mut()))
}

/// A region that is star-shaped about the origin, given by a signed margin
/// (nonnegative inside).
pub trait StarRegion: Sync {
    /// Number of coordinates (2 or 3).
    fn arity(&self) -> usize;

    /// A radius the region certainly does not reach.
    fn bounding_radius(&self) -> f64;

    /// Signed distance-like margin: `>= 0` inside, `< 0` outside.
    fn margin(&self, c: &[f64]) -> Result<f64>;

    /// Membership tolerance used by [`StarRegion::contains`].
    fn tol(&self) -> f64 {
        DEFAULT_FEASIBILITY_TOL
    }

    fn contains(&self, c: &[f64]) -> Result<bool> {
        Ok(self.margin(c)? >= -self.tol())
    }

    /// Distance from the origin to the boundary along `u` (unit length).
    /// The default bisects membership on `[0, bounding_radius]` to 1e-12.
    fn radial_extent(&self, u: &[f64]) -> Result<f64> {
        bisect_extent(self, u)
    }
}

/// Bisection on `[0, bounding_radius]`: the predicate holds at the returned
/// `lo` and fails at `lo + 1e-12`.
pub fn bisect_extent<R: StarRegion + ?Sized>(region: &R, u: &[f64]) -> Result<f64> {
    let mut hi = region.bounding_radius();
    let point = |r: f64| -> Vec<f64> { u.iter().map(|x| r * x).collect() };
    if region.contains(&point(hi))? {
        return Err(Error::BracketFailure { radius: hi });
    }
    let mut lo = 0.0;
    if !region.contains(&point(lo))? {
        return Err(Error::invalid("origin is not inside the region"));
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if region.contains(&point(mid))? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Feasibility of a section intersected with zero or more PPT conditions.
#[derive(Clone, Debug)]
pub struct RegionPredicate {
    spec: SectionSpec,
    conditions: Vec<TransposeSpec>,
    tol: f64,
    pencil: Arc<SectionPencil>,
}

impl RegionPredicate {
    pub fn new(spec: SectionSpec, conditions: Vec<TransposeSpec>) -> Result<Self> {
        let pencil = Arc::new(SectionPencil::new(&spec, &conditions)?);
        Ok(Self {
            spec,
            conditions,
            tol: DEFAULT_FEASIBILITY_TOL,
            pencil,
        })
    }

    pub fn feasibility(spec: SectionSpec) -> Result<Self> {
        Self::new(spec, Vec::new())
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn spec(&self) -> &SectionSpec {
        &self.spec
    }

    pub fn conditions(&self) -> &[TransposeSpec] {
        &self.conditions
    }

    pub fn pencil(&self) -> &SectionPencil {
        &self.pencil
    }

    /// The same section with only the positivity condition.
    pub fn feasible_part(&self) -> Self {
        Self {
            spec: self.spec.clone(),
            conditions: Vec::new(),
            tol: self.tol,
            pencil: Arc::new(SectionPencil::new(&self.spec, &[]).expect("validated")),
        }
    }

    /// Exit radius of every condition (index 0 = positivity) along `u`.
    pub fn radii(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        with_scratch(|s| {
            for (k, slot) in out.iter_mut().enumerate().take(self.pencil.condition_count()) {
                *slot = self.pencil.exit_radius(k, u, s)?;
            }
            Ok(())
        })
    }

    /// Margin of each condition separately (index 0 = positivity).
    pub fn margins(&self, c: &[f64]) -> Result<Vec<f64>> {
        with_scratch(|s| {
            (0..self.pencil.condition_count())
                .map(|k| self.pencil.margin(k, c, s))
                .collect()
        })
    }
}

impl StarRegion for RegionPredicate {
    fn arity(&self) -> usize {
        self.spec.arity()
    }

    fn bounding_radius(&self) -> f64 {
        bounding_radius(self.spec.n())
    }

    fn tol(&self) -> f64 {
        self.tol
    }

    fn margin(&self, c: &[f64]) -> Result<f64> {
        if c.len() != self.arity() {
            return Err(Error::DimensionMismatch {
                expected: self.arity(),
                found: c.len(),
            });
        }
        Ok(self.margins(c)?.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Exact: the margin along a ray is `1/n - r mu` for each condition.
    fn radial_extent(&self, u: &[f64]) -> Result<f64> {
        let mut r = vec![0.0; self.pencil.condition_count()];
        self.radii(u, &mut r)?;
        Ok(r.into_iter().fold(f64::INFINITY, f64::min))
    }
}

/// Measures of a section and its PPT subregions, from one quadrature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measures {
    /// Measure of the feasible region.
    pub total: f64,
    /// Measure of feasible ∧ PPT_k for each condition `k` separately.
    pub per_condition: Vec<f64>,
    /// Measure of feasible ∧ all PPT conditions.
    pub joint: f64,
    /// Summed quadrature error estimate.
    pub error_estimate: f64,
    /// Largest change of any channel when every panel is split once more.
    pub audit_deviation: Option<f64>,
    pub evaluations: usize,
}

/// Channel layout: `[total, cond_1, ..., cond_K, joint]`, each the region's
/// radius raised to `power`.
fn channel_values(radii: &[f64], power: i32, scale: f64, out: &mut [f64]) {
    let r0 = radii[0];
    let k = radii.len() - 1;
    out[0] = scale * r0.powi(power);
    let mut joint = r0;
    for j in 1..=k {
        let rj = r0.min(radii[j]);
        joint = joint.min(radii[j]);
        out[j] = scale * rj.powi(power);
    }
    out[k + 1] = scale * joint.powi(power);
}

fn measures_from(values: &[f64], q: &QuadResult, audit: Option<Vec<f64>>) -> Measures {
    let k = values.len() - 2;
    Measures {
        total: values[0],
        per_condition: values[1..=k].to_vec(),
        joint: values[k + 1],
        error_estimate: q.error,
        audit_deviation: audit.map(|a| a.iter().zip(values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)),
        evaluations: q.evals,
    }
}

fn require_arity(pred: &RegionPredicate, arity: usize) -> Result<()> {
    if pred.arity() != arity {
        return Err(Error::invalid(format!(
            "{} is a {}-parameter section, expected {arity}",
            pred.spec(),
            pred.arity()
        )));
    }
    Ok(())
}

/// Areas of the feasible region, of each single-condition region and of the
/// joint region of a two-parameter section.
pub fn measure_2d(pred: &RegionPredicate, opts: &QuadOptions, audit: bool) -> Result<Measures> {
    require_arity(pred, 2)?;
    let kc = pred.pencil.condition_count();
    let channels = kc + 1;
    let f = |theta: f64, out: &mut [f64]| -> Result<()> {
        let mut radii = [0.0; 8];
        let u = [theta.cos(), theta.sin()];
        pred.radii(&u, &mut radii[..kc])?;
        channel_values(&radii[..kc], 2, 0.5, out);
        Ok(())
    };
    let q = quadrature::integrate(f, 0.0, 2.0 * PI, channels, opts)?;
    let a = if audit {
        Some(quadrature::audit(f, &q, channels)?)
    } else {
        None
    };
    Ok(measures_from(&q.values, &q, a))
}

/// Area of the region described by `pred` (all of its conditions jointly).
pub fn area_2d(pred: &RegionPredicate) -> Result<f64> {
    Ok(measure_2d(pred, &QuadOptions::default(), false)?.joint)
}

/// Options for the nested sphere quadrature.
#[derive(Clone, Debug)]
pub struct SphereOptions {
    pub outer: QuadOptions,
    pub inner: QuadOptions,
}

impl Default for SphereOptions {
    fn default() -> Self {
        Self {
            outer: QuadOptions {
                rel_tol: 1e-8,
                initial_panels: 8,
                ..QuadOptions::default()
            },
            inner: QuadOptions {
                rel_tol: 1e-10,
                initial_panels: 16,
                ..QuadOptions::default()
            },
        }
    }
}

/// Unit vector with polar cosine `t` and azimuth `phi`.
pub(crate) fn sphere_point(t: f64, phi: f64) -> [f64; 3] {
    let s = (1.0 - t * t).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), t]
}

/// Nested integral over the sphere in `(t = cos theta, phi)`; `f` fills the
/// channel values at a unit direction.
pub(crate) fn integrate_sphere<F>(f: F, channels: usize, opts: &SphereOptions) -> Result<QuadResult>
where
    F: Fn([f64; 3], &mut [f64]) -> Result<()>,
{
    let inner = |t: f64, out: &mut [f64]| -> Result<()> {
        let q = quadrature::integrate(
            |phi, o| f(sphere_point(t, phi), o),
            0.0,
            2.0 * PI,
            channels,
            &opts.inner,
        )?;
        out.copy_from_slice(&q.values);
        Ok(())
    };
    quadrature::integrate(inner, -1.0, 1.0, channels, &opts.outer)
}

/// Volumes of the feasible region, of each single-condition region and of
/// the joint region of a three-parameter section.
pub fn measure_3d(pred: &RegionPredicate, opts: &SphereOptions, audit: bool) -> Result<Measures> {
    require_arity(pred, 3)?;
    let kc = pred.pencil.condition_count();
    let channels = kc + 1;
    let f = |u: [f64; 3], out: &mut [f64]| -> Result<()> {
        let mut radii = [0.0; 8];
        pred.radii(&u, &mut radii[..kc])?;
        channel_values(&radii[..kc], 3, 1.0 / 3.0, out);
        Ok(())
    };
    let q = integrate_sphere(f, channels, opts)?;
    let a = if audit {
        let refined = SphereOptions {
            outer: QuadOptions {
                rel_tol: opts.outer.rel_tol / 4.0,
                ..opts.outer.clone()
            },
            inner: QuadOptions {
                rel_tol: opts.inner.rel_tol / 4.0,
                ..opts.inner.clone()
            },
        };
        Some(integrate_sphere(f, channels, &refined)?.values)
    } else {
        None
    };
    Ok(measures_from(&q.values, &q, a))
}

pub fn volume_3d(pred: &RegionPredicate) -> Result<f64> {
    Ok(measure_3d(pred, &SphereOptions::default(), false)?.joint)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pred(n: usize, gens: &[usize], conds: &str) -> RegionPredicate {
        let ts = if conds.is_empty() {
            vec![]
        } else {
            TransposeSpec::parse_list(conds).unwrap()
        };
        RegionPredicate::new(SectionSpec::new(n, gens).unwrap(), ts).unwrap()
    }

    #[test]
    fn radial_extent_examples() {
        let p = pred(4, &[3, 6], "");
        assert!((p.radial_extent(&[-1.0, 0.0]).unwrap() - 0.5).abs() < 1e-15);
        let sq = pred(6, &[1, 13], "");
        assert!((sq.radial_extent(&[1.0, 0.0]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let disk = pred(6, &[1, 13], "3x2");
        for k in 0..12 {
            let th = k as f64 * 0.37;
            let r = disk.radial_extent(&[th.cos(), th.sin()]).unwrap();
            assert!((r - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn bisection_matches_exact_extent() {
        let p = pred(8, &[35, 38], "4x2,2x4,mid222");
        for k in 0..16 {
            let th = k as f64 * 0.41;
            let u = [th.cos(), th.sin()];
            let exact = p.radial_extent(&u).unwrap();
            let bis = bisect_extent(&p, &u).unwrap();
            assert!((exact - bis).abs() < 1e-9, "{exact} vs {bis}");
        }
    }

    #[test]
    fn area_of_3_6() {
        let m = measure_2d(&pred(4, &[3, 6], "2x2"), &QuadOptions::default(), true).unwrap();
        assert!((m.total - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-9);
        assert!((m.joint - 2.0 / 3.0).abs() < 1e-9);
        assert!(m.audit_deviation.unwrap() < 1e-9);
    }

    #[test]
    fn arity_checked() {
        assert!(measure_2d(&pred(4, &[1, 4, 6], ""), &QuadOptions::default(), false).is_err());
        assert!(measure_3d(&pred(4, &[1, 4], ""), &SphereOptions::default(), false).is_err());
    }
}
