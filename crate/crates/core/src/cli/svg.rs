use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::error::Result;
use crate::ptrans::TransposeSpec;
use crate::regions::{boundary_partition_2d, boundary_polyline_2d, RegionPredicate, StarRegion};
use crate::sections::{bounding_radius, SectionSpec};

const SIZE: f64 = 800.0;
const PLOT_TARGET: f64 = 1e-7;

struct Frame {
    scale: f64,
}

impl Frame {
    fn xy(&self, p: [f64; 2]) -> (f64, f64) {
        (SIZE / 2.0 + p[0] * self.scale, SIZE / 2.0 - p[1] * self.scale)
    }

    fn path(&self, pts: &[[f64; 2]], close: bool) -> String {
        let mut d = String::new();
        for (i, &p) in pts.iter().enumerate() {
            let (x, y) = self.xy(p);
            let _ = write!(d, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" });
        }
        if close {
            d.push('Z');
        }
        d.trim_end().to_string()
    }
}

fn on_ray<R: StarRegion>(region: &R, theta: f64) -> Result<[f64; 2]> {
    let u = [theta.cos(), theta.sin()];
    let r = region.radial_extent(&u)?;
    Ok([r * u[0], r * u[1]])
}

/// Plot of a pair section: feasible outline, joint PPT region filled,
/// feasible boundary arcs coloured by whether they satisfy every condition.
/// Fixed 800x800 viewport; axes span plus/minus the bounding radius.
pub fn render_pair_svg(n: usize, pair: [usize; 2], conditions: &[TransposeSpec]) -> Result<String> {
    let spec = SectionSpec::new(n, &pair)?;
    let joint = RegionPredicate::new(spec.clone(), conditions.to_vec())?;
    let feasible = joint.feasible_part();
    let extent = bounding_radius(n);
    let frame = Frame {
        scale: SIZE / (2.0 * extent),
    };

    let outline = boundary_polyline_2d(&feasible, PLOT_TARGET)?;
    let inner = boundary_polyline_2d(&joint, PLOT_TARGET)?;
    let partition = boundary_partition_2d(&feasible, &joint, PLOT_TARGET)?;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="800" height="800" viewBox="0 0 800 800">"#
    );
    let conds: Vec<String> = conditions.iter().map(|c| c.label()).collect();
    let _ = writeln!(svg, "  <title>{spec} [{}]</title>", conds.join(","));
    let _ = writeln!(
        svg,
        r##"  <rect x="0" y="0" width="800" height="800" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        svg,
        r##"  <g stroke="#bbbbbb" stroke-width="1"><line x1="0" y1="400" x2="800" y2="400"/><line x1="400" y1="0" x2="400" y2="800"/></g>"##
    );
    let _ = writeln!(
        svg,
        r##"  <text x="792" y="392" font-size="14" text-anchor="end" fill="#666666">c{} = {extent:.4}</text>"##,
        pair[0]
    );
    let _ = writeln!(
        svg,
        r##"  <text x="408" y="18" font-size="14" fill="#666666">c{} = {extent:.4}</text>"##,
        pair[1]
    );
    let _ = writeln!(
        svg,
        r##"  <path id="joint" d="{}" fill="#9ec5e8" fill-opacity="0.8" stroke="#2b6ca3" stroke-width="1"/>"##,
        frame.path(&inner.points(), true)
    );
    let _ = writeln!(
        svg,
        r##"  <path id="feasible" d="{}" fill="none" stroke="#000000" stroke-width="1.5"/>"##,
        frame.path(&outline.points(), true)
    );

    let profile = &partition.profile;
    let _ = writeln!(svg, r#"  <g id="arcs" fill="none" stroke-width="4">"#);
    for arc in &partition.arcs {
        let mut pts = vec![on_ray(&feasible, arc.theta_start)?];
        for shift in [0.0, TAU] {
            for (t, r) in profile.thetas.iter().zip(&profile.radii) {
                let tt = t + shift;
                if tt > arc.theta_start && tt < arc.theta_end {
                    pts.push([r * t.cos(), r * t.sin()]);
                }
            }
        }
        pts.push(on_ray(&feasible, arc.theta_end)?);
        let colour = if arc.classified { "#1a9850" } else { "#d73027" };
        let _ = writeln!(svg, r#"    <path d="{}" stroke="{colour}"/>"#, frame.path(&pts, false));
    }
    let _ = writeln!(svg, "  </g>");
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}
