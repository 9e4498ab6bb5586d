use std::f64::consts::PI;

use bloch_atlas::regions::quadrature::QuadOptions;
use bloch_atlas::regions::{boundary_polyline_2d, measure_2d, RegionPredicate, StarRegion};
use bloch_atlas::sections::bounding_radius;
use bloch_atlas::{SectionSpec, TransposeSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn region(n: usize, gens: &[usize], decomp: &str) -> RegionPredicate {
    let conds = if decomp.is_empty() {
        Vec::new()
    } else {
        TransposeSpec::parse_list(decomp).unwrap()
    };
    RegionPredicate::new(SectionSpec::new(n, gens).unwrap(), conds).unwrap()
}

fn sample_inside(rng: &mut ChaCha8Rng, r: &RegionPredicate) -> Vec<f64> {
    let b = r.bounding_radius();
    loop {
        let c: Vec<f64> = (0..r.arity()).map(|_| rng.gen_range(-b..b)).collect();
        if r.contains(&c).unwrap() {
            return c;
        }
    }
}

#[test]
fn convex_midpoints() {
    let scenarios: [(usize, &[usize], &str); 8] = [
        (4, &[3, 6], "2x2"),
        (4, &[9, 15], ""),
        (6, &[8, 13], "3x2"),
        (6, &[24, 25], "3x2,2x3"),
        (8, &[35, 38], "4x2,2x4,mid222"),
        (10, &[33, 80], "5x2,2x5"),
        (4, &[1, 4, 6], "2x2"),
        (4, &[10, 12, 13], "2x2"),
    ];
    scenarios.par_iter().enumerate().for_each(|(i, &(n, gens, decomp))| {
        let r = region(n, gens, decomp);
        let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
        let mut violations = 0;
        for _ in 0..10_000 {
            let a = sample_inside(&mut rng, &r);
            let b = sample_inside(&mut rng, &r);
            let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
            if !r.contains(&mid).unwrap() {
                violations += 1;
            }
        }
        assert_eq!(violations, 0, "n={n} {gens:?} [{decomp}]");
    });
}

/// Counts grid cells whose centre is inside. For a convex region of
/// perimeter `P` the cells meeting the boundary number at most
/// `4 (P / h + 1)`, which bounds the counting error.
fn grid_count(r: &RegionPredicate, cells: usize) -> (f64, f64) {
    let b = r.bounding_radius();
    let h = 2.0 * b / cells as f64;
    let inside: usize = (0..cells)
        .into_par_iter()
        .map(|i| {
            let x = -b + (i as f64 + 0.5) * h;
            (0..cells)
                .filter(|&j| r.contains(&[x, -b + (j as f64 + 0.5) * h]).unwrap())
                .count()
        })
        .sum();
    let perimeter = boundary_polyline_2d(r, 1e-9).unwrap().length;
    (inside as f64 * h * h, 4.0 * (perimeter / h + 1.0) * h * h)
}

#[test]
fn grid_count_area_oracle() {
    let scenarios: [(usize, [usize; 2], &str); 5] = [
        (4, [3, 6], "2x2"),
        (4, [6, 8], "2x2"),
        (6, [1, 13], "3x2"),
        (8, [8, 49], "4x2"),
        (9, [40, 63], "3x3"),
    ];
    for (n, gens, decomp) in scenarios {
        let joint = region(n, &gens, decomp);
        let feasible = joint.feasible_part();
        let m = measure_2d(&joint, &QuadOptions::default(), false).unwrap();
        for (r, exact) in [(&feasible, m.total), (&joint, m.joint)] {
            let (count, bound) = grid_count(r, 1024);
            assert!(
                (count - exact).abs() <= bound,
                "n={n} {gens:?}: grid {count} vs {exact} (bound {bound})"
            );
        }
    }
    // finer grid on the closed-form case
    let r = region(4, &[3, 6], "");
    let (count, _) = grid_count(&r, 4096);
    assert!((count - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-3);
}

#[test]
fn closed_form_regions() {
    // n=6 {1,13}: feasible square of side 2/3, PPT disk of radius 1/3
    let m = measure_2d(&region(6, &[1, 13], "3x2"), &QuadOptions::default(), true).unwrap();
    assert!((m.total - 4.0 / 9.0).abs() < 1e-10);
    assert!((m.joint - PI / 9.0).abs() < 1e-10);
    // radial extents
    let r = region(4, &[3, 6], "");
    assert!((r.radial_extent(&[-1.0, 0.0]).unwrap() - 0.5).abs() < 1e-14);
    let r = region(6, &[1, 13], "");
    assert!((r.radial_extent(&[1.0, 0.0]).unwrap() - 1.0 / 3.0).abs() < 1e-14);
}

#[test]
fn feasible_region_inside_purity_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (n, gens) in [(4, vec![3, 6]), (6, vec![8, 13]), (9, vec![1, 13, 40])] {
        let r = region(n, &gens, "");
        let b = bounding_radius(n);
        for _ in 0..2000 {
            let c = sample_inside(&mut rng, &r);
            assert!(c.iter().map(|x| x * x).sum::<f64>().sqrt() <= b);
        }
    }
}

#[test]
fn n8_sweep_probabilities_are_monotone_under_added_conditions() {
    let conds = TransposeSpec::parse_list("4x2,2x4,mid222").unwrap();
    let opts = QuadOptions {
        rel_tol: 1e-8,
        ..QuadOptions::default()
    };
    let m = 63;
    let pairs: Vec<[usize; 2]> = (1..=m).flat_map(|a| ((a + 1)..=m).map(move |b| [a, b])).collect();
    assert_eq!(pairs.len(), 1953);
    pairs.par_iter().for_each(|&p| {
        let spec = SectionSpec::new(8, &p).unwrap();
        let single = measure_2d(
            &RegionPredicate::new(spec.clone(), conds[..1].to_vec()).unwrap(),
            &opts,
            false,
        )
        .unwrap();
        let bi = measure_2d(
            &RegionPredicate::new(spec.clone(), conds[..2].to_vec()).unwrap(),
            &opts,
            false,
        )
        .unwrap();
        let tri = measure_2d(&RegionPredicate::new(spec, conds.clone()).unwrap(), &opts, false).unwrap();
        let tol = 1e-9;
        for m in [&single, &bi, &tri] {
            let prob = m.joint / m.total;
            assert!((0.0..=1.0 + tol).contains(&prob), "{p:?}");
            for &pc in &m.per_condition {
                assert!(m.joint <= pc + tol && pc <= m.total + tol, "{p:?}");
            }
        }
        // separate quadratures agree to their relative tolerance
        let cross = 10.0 * opts.rel_tol * single.total;
        assert!(
            bi.joint <= single.joint + cross && tri.joint <= bi.joint + cross,
            "{p:?}"
        );
        assert!((single.total - tri.total).abs() < cross);
    });
}
