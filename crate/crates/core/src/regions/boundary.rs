//! Boundary curves of two-parameter regions: polylines, classified
//! partitions and interior interfaces.
//!
//! Lengths are Euclidean arc lengths in coefficient coordinates.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{StarRegion, BOUNDARY_TOL, INTERIOR_TOL};
use crate::error::{Error, Result};

const INITIAL_NODES: usize = 256;
const MIN_SEGMENT_ANGLE: f64 = 1e-12;
const TRANSITION_ITERS: usize = 60;
const STRICT_TOL: f64 = 1e-12;

/// Boundary sampled at angles `thetas` (ascending, in `[0, 2 pi)`), closed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialProfile {
    pub thetas: Vec<f64>,
    pub radii: Vec<f64>,
    /// Length of the closed polyline.
    pub length: f64,
}

impl RadialProfile {
    pub fn points(&self) -> Vec<[f64; 2]> {
        self.thetas
            .iter()
            .zip(&self.radii)
            .map(|(t, r)| [r * t.cos(), r * t.sin()])
            .collect()
    }
}

fn boundary_point<R: StarRegion + ?Sized>(region: &R, theta: f64) -> Result<[f64; 2]> {
    let r = region.radial_extent(&[theta.cos(), theta.sin()])?;
    Ok([r * theta.cos(), r * theta.sin()])
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

struct Refiner<'a, R: ?Sized> {
    region: &'a R,
    tol_per_radian: f64,
    out: Vec<(f64, [f64; 2])>,
}

impl<R: StarRegion + ?Sized> Refiner<'_, R> {
    /// Appends the points strictly between `a` and `b`.
    fn refine(&mut self, ta: f64, pa: [f64; 2], tb: f64, pb: [f64; 2]) -> Result<()> {
        let tm = 0.5 * (ta + tb);
        let pm = boundary_point(self.region, tm)?;
        let gain = dist(pa, pm) + dist(pm, pb) - dist(pa, pb);
        let split = gain > self.tol_per_radian * (tb - ta) && tb - ta > MIN_SEGMENT_ANGLE;
        if split {
            self.refine(ta, pa, tm, pm)?;
        }
        self.out.push((tm, pm));
        if split {
            self.refine(tm, pm, tb, pb)?;
        }
        Ok(())
    }
}

/// Adaptive polyline of the region boundary. Starting from 256 equally
/// spaced directions, a chord is split while halving it lengthens the
/// polyline by more than its share (by angle) of `target_error`; corners are
/// chased down to angular width 1e-12.
pub fn boundary_polyline_2d<R: StarRegion + ?Sized>(region: &R, target_error: f64) -> Result<RadialProfile> {
    if region.arity() != 2 {
        return Err(Error::invalid("boundary polylines need a two-parameter region"));
    }
    if target_error.is_nan() || target_error <= 0.0 {
        return Err(Error::invalid("target error must be positive"));
    }
    let step = 2.0 * PI / INITIAL_NODES as f64;
    let nodes: Vec<(f64, [f64; 2])> = (0..=INITIAL_NODES)
        .map(|i| {
            let t = i as f64 * step;
            Ok((t, boundary_point(region, t)?))
        })
        .collect::<Result<_>>()?;
    let mut refiner = Refiner {
        region,
        tol_per_radian: target_error / (2.0 * PI),
        out: Vec::new(),
    };
    for w in nodes.windows(2) {
        refiner.out.push(w[0]);
        refiner.refine(w[0].0, w[0].1, w[1].0, w[1].1)?;
    }
    let pts = refiner.out;
    let mut length = 0.0;
    for i in 0..pts.len() {
        length += dist(pts[i].1, pts[(i + 1) % pts.len()].1);
    }
    Ok(RadialProfile {
        thetas: pts.iter().map(|p| p.0).collect(),
        radii: pts.iter().map(|p| p.1[0].hypot(p.1[1])).collect(),
        length,
    })
}

/// A maximal boundary arc with a constant classification.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryArc {
    pub theta_start: f64,
    /// May exceed `2 pi` for the arc that wraps around.
    pub theta_end: f64,
    pub length: f64,
    pub classified: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Partition {
    pub total_length: f64,
    pub classified_length: f64,
    pub arcs: Vec<BoundaryArc>,
    pub profile: RadialProfile,
}

/// How a boundary point's score is labelled. A point is provisionally "in"
/// when `score >= loose`. An arc found between two transitions keeps its
/// label only if its quarter, mid and three-quarter points are in with
/// `score >= strict_in` (or out with `score < strict_out`); otherwise the
/// arc is an artefact of the loose tolerance near a tangency and flips.
#[derive(Clone, Copy, Debug)]
struct Thresholds {
    loose: f64,
    strict_in: f64,
    strict_out: f64,
}

fn partition_by<R, S>(region: &R, score: S, th: Thresholds, target_error: f64) -> Result<Partition>
where
    R: StarRegion + ?Sized,
    S: Fn([f64; 2]) -> Result<f64>,
{
    let profile = boundary_polyline_2d(region, target_error)?;
    let pts = profile.points();
    let n = pts.len();
    let label_at = |p: [f64; 2]| -> Result<bool> { Ok(score(p)? >= th.loose) };
    let labels: Vec<bool> = pts.iter().map(|&p| label_at(p)).collect::<Result<_>>()?;

    // Walk the closed polyline, inserting a transition point wherever the
    // label changes between consecutive vertices.
    struct Event {
        theta: f64,
        point: [f64; 2],
        transition: bool,
        label: bool,
    }
    let mut events: Vec<Event> = Vec::with_capacity(n + 16);
    for i in 0..n {
        let j = (i + 1) % n;
        let (ti, tj) = (
            profile.thetas[i],
            if j == 0 {
                profile.thetas[0] + 2.0 * PI
            } else {
                profile.thetas[j]
            },
        );
        events.push(Event {
            theta: ti,
            point: pts[i],
            transition: false,
            label: labels[i],
        });
        if labels[i] != labels[j] {
            let (mut lo, mut hi) = (ti, tj);
            for _ in 0..TRANSITION_ITERS {
                if hi - lo <= 1e-14 {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if label_at(boundary_point(region, mid)?)? == labels[i] {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = 0.5 * (lo + hi);
            events.push(Event {
                theta: t,
                point: boundary_point(region, t)?,
                transition: true,
                label: labels[j],
            });
        }
    }

    let mut arcs = Vec::new();
    let Some(first) = events.iter().position(|e| e.transition) else {
        let classified = confirm(
            region,
            &score,
            th,
            profile.thetas[0],
            profile.thetas[0] + 2.0 * PI,
            labels[0],
        )?;
        return Ok(Partition {
            total_length: profile.length,
            classified_length: if classified { profile.length } else { 0.0 },
            arcs: vec![BoundaryArc {
                theta_start: profile.thetas[0],
                theta_end: profile.thetas[0] + 2.0 * PI,
                length: profile.length,
                classified,
            }],
            profile,
        });
    };
    let m = events.len();
    let unwrapped = |idx: usize, closing: bool| {
        let t = events[idx].theta;
        if idx < first || closing {
            t + 2.0 * PI
        } else {
            t
        }
    };
    let mut start = first;
    let mut acc = 0.0;
    for step in 1..=m {
        let cur = (first + step) % m;
        let prev = (first + step - 1) % m;
        acc += dist(events[prev].point, events[cur].point);
        if events[cur].transition {
            let t0 = unwrapped(start, false);
            let t1 = unwrapped(cur, step == m);
            let classified = confirm(region, &score, th, t0, t1, events[start].label)?;
            arcs.push(BoundaryArc {
                theta_start: t0,
                theta_end: t1,
                length: acc,
                classified,
            });
            acc = 0.0;
            start = cur;
        }
    }
    let total_length: f64 = arcs.iter().map(|a| a.length).sum();
    let classified_length = arcs.iter().filter(|a| a.classified).map(|a| a.length).sum();
    Ok(Partition {
        total_length,
        classified_length,
        arcs,
        profile,
    })
}

fn confirm<R, S>(region: &R, score: &S, th: Thresholds, t0: f64, t1: f64, provisional: bool) -> Result<bool>
where
    R: StarRegion + ?Sized,
    S: Fn([f64; 2]) -> Result<f64>,
{
    for frac in [0.25, 0.5, 0.75] {
        let s = score(boundary_point(region, t0 + frac * (t1 - t0))?)?;
        let holds = if provisional {
            s >= th.strict_in
        } else {
            s < th.strict_out
        };
        if !holds {
            return Ok(!provisional);
        }
    }
    Ok(provisional)
}

/// Splits the boundary of `region` into the part lying in `classifier`
/// (within 1e-9) and the rest. Isolated touching points (tangencies)
/// contribute zero length.
pub fn boundary_partition_2d<R, C>(region: &R, classifier: &C, target_error: f64) -> Result<Partition>
where
    R: StarRegion + ?Sized,
    C: StarRegion + ?Sized,
{
    partition_by(
        region,
        |p| classifier.margin(&p),
        Thresholds {
            loose: -BOUNDARY_TOL,
            strict_in: -STRICT_TOL,
            strict_out: -STRICT_TOL,
        },
        target_error,
    )
}

/// Length of the part of `inner`'s boundary lying strictly inside `outer`
/// (margin above 1e-8): the interface separating `inner` from the rest of
/// `outer`. Returned as a partition of `inner`'s boundary whose classified
/// arcs form the interface.
pub fn interface_partition_2d<O, I>(outer: &O, inner: &I, target_error: f64) -> Result<Partition>
where
    O: StarRegion + ?Sized,
    I: StarRegion + ?Sized,
{
    partition_by(
        inner,
        |p| outer.margin(&p),
        Thresholds {
            loose: INTERIOR_TOL,
            strict_in: INTERIOR_TOL,
            strict_out: STRICT_TOL,
        },
        target_error,
    )
}

pub fn interior_interface_2d<O, I>(outer: &O, inner: &I, target_error: f64) -> Result<f64>
where
    O: StarRegion + ?Sized,
    I: StarRegion + ?Sized,
{
    Ok(interface_partition_2d(outer, inner, target_error)?.classified_length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptrans::TransposeSpec;
    use crate::regions::RegionPredicate;
    use crate::sections::SectionSpec;

    fn pred(n: usize, gens: &[usize], conds: &str) -> RegionPredicate {
        let ts = if conds.is_empty() {
            vec![]
        } else {
            TransposeSpec::parse_list(conds).unwrap()
        };
        RegionPredicate::new(SectionSpec::new(n, gens).unwrap(), ts).unwrap()
    }

    #[test]
    fn square_perimeter() {
        let p = boundary_polyline_2d(&pred(6, &[1, 13], ""), 1e-9).unwrap();
        assert!((p.length - 8.0 / 3.0).abs() < 1e-6, "{}", p.length);
    }

    #[test]
    fn square_tangent_disk_classifies_nothing() {
        let f = pred(6, &[1, 13], "");
        let c = pred(6, &[1, 13], "3x2");
        let part = boundary_partition_2d(&f, &c, 1e-9).unwrap();
        assert_eq!(part.classified_length, 0.0);
        let iface = interior_interface_2d(&f, &c, 1e-9).unwrap();
        assert!((iface - 2.0 * PI / 3.0).abs() < 1e-6, "{iface}");
    }

    #[test]
    fn identical_regions_have_no_interface() {
        let f = pred(4, &[3, 6], "");
        assert_eq!(interior_interface_2d(&f, &f, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn parabolic_arcs_of_3_6() {
        let f = pred(4, &[3, 6], "");
        let c = pred(4, &[3, 6], "2x2");
        let part = boundary_partition_2d(&f, &c, 1e-9).unwrap();
        assert!(part.classified_length > 0.0 && part.classified_length < part.total_length);
        for arc in part.arcs.iter().filter(|a| a.classified) {
            let mid = 0.5 * (arc.theta_start + arc.theta_end);
            assert!(mid.cos() >= 0.0, "classified arc centred at {mid}");
        }
    }
}
