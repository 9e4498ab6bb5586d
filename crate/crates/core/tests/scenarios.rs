use std::f64::consts::PI;

use bloch_atlas::regions::{boundary_partition_2d, interior_interface_2d, RegionPredicate};
use bloch_atlas::scenarios::{analyze_pair_with, AnalysisOptions, ConventionNote};
use bloch_atlas::{analyze_pair, analyze_triad, Error, SectionSpec, TransposeSpec};

fn conds(s: &str) -> Vec<TransposeSpec> {
    TransposeSpec::parse_list(s).unwrap()
}

#[test]
fn similar_regions_scale_boundary_lengths() {
    // the n=6 {3,11} section is the n=4 {3,6} section scaled by 2/3
    let a = analyze_pair(6, [3, 11], &conds("3x2"), true).unwrap();
    let b = analyze_pair(4, [3, 6], &conds("2x2"), true).unwrap();
    let (la, lb) = (a.boundary.unwrap().total_length, b.boundary.unwrap().total_length);
    assert!((la / lb - 2.0 / 3.0).abs() < 1e-6, "{la} / {lb}");
    assert!((a.total / b.total - 4.0 / 9.0).abs() < 1e-9);
}

#[test]
fn inscribed_disk_interface() {
    let r = analyze_pair(6, [1, 13], &conds("3x2"), true).unwrap();
    let b = r.boundary.unwrap();
    assert!((b.total_length - 8.0 / 3.0).abs() < 1e-6);
    // the disk touches the square at four points only
    assert!(b.classified_length.abs() < 1e-9);
    assert_eq!(b.boundary_probability, 0.0);
    assert!((b.interior_length.unwrap() - 2.0 * PI / 3.0).abs() < 1e-6);
    assert_eq!(b.convention_note, ConventionNote::UnresolvedConvention);
    assert_eq!(r.convention_note, ConventionNote::PaperVerified);
}

#[test]
fn parabolic_arcs_are_the_classified_part_of_3_6() {
    let joint = RegionPredicate::new(SectionSpec::pair(4, 3, 6).unwrap(), conds("2x2")).unwrap();
    let feasible = joint.feasible_part();
    let part = boundary_partition_2d(&feasible, &joint, 1e-9).unwrap();
    for arc in &part.arcs {
        let mid = 0.5 * (arc.theta_start + arc.theta_end);
        assert_eq!(arc.classified, mid.cos() > 0.0, "arc {arc:?}");
    }
    let interior = interior_interface_2d(&feasible, &joint, 1e-9).unwrap();
    assert!(interior > 0.0);
}

#[test]
fn tighter_tolerance_moves_values_by_less_than_the_looser_one() {
    let c = conds("3x2,2x3");
    for (pair, loose) in [([24, 25], 1e-5), ([8, 13], 1e-6), ([13, 24], 1e-4)] {
        let a = analyze_pair_with(6, pair, &c, false, &AnalysisOptions::default().with_area_tol(loose)).unwrap();
        let b = analyze_pair_with(6, pair, &c, false, &AnalysisOptions::default().with_area_tol(1e-11)).unwrap();
        for (x, y) in [(a.total, b.total), (a.joint, b.joint), (a.probability, b.probability)] {
            assert!((x - y).abs() <= loose * y.abs().max(1.0), "{pair:?}: {x} vs {y}");
        }
    }
}

#[test]
fn conditions_only_shrink_the_joint_region() {
    let single = analyze_pair(8, [35, 38], &conds("4x2"), false).unwrap();
    let tri = analyze_pair(8, [35, 38], &conds("4x2,2x4,mid222"), false).unwrap();
    assert_eq!(tri.per_condition.len(), 3);
    assert!((tri.per_condition[0] - single.joint).abs() < 1e-9);
    assert!(tri.joint <= tri.per_condition.iter().cloned().fold(f64::INFINITY, f64::min) + 1e-12);
}

#[test]
fn triad_totals() {
    let r = analyze_triad(4, [10, 12, 13], &conds("2x2"), false).unwrap();
    assert!((r.total - PI / 6.0).abs() < 1e-6);
    assert!(r.audit_deviation.unwrap() < 1e-5);
}

#[test]
fn failures_name_the_scenario() {
    let e = analyze_pair(4, [3, 3], &conds("2x2"), false).unwrap_err();
    assert!(e.to_string().starts_with("n=4 {3,3} [2x2]"), "{e}");
    assert!(!e.is_numerical());
    let e = analyze_pair(6, [3, 6], &conds("2x2"), false).unwrap_err();
    assert!(matches!(e, Error::Scenario { .. }));
    let e = analyze_triad(4, [1, 2, 16], &conds("2x2"), false).unwrap_err();
    assert!(e.to_string().contains("{1,2,16}"));
}
