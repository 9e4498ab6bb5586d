use bloch_atlas::linalg::{eigenvalues, eigh, min_eigenvalue, HermitianMatrix, C64, MAX_DIM};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, real: bool, sparsity: f64) -> HermitianMatrix {
    let mut m = HermitianMatrix::zeros(dim).unwrap();
    for j in 0..dim {
        m.set_diagonal(j, rng.gen_range(-1.0..1.0));
        for k in (j + 1)..dim {
            if rng.gen::<f64>() < sparsity {
                continue;
            }
            let im = if real { 0.0 } else { rng.gen_range(-1.0..1.0) };
            m.set(j, k, C64::new(rng.gen_range(-1.0..1.0), im));
        }
    }
    m
}

/// Residual `max |A v - lambda v|` and orthonormality defect of `eigh`.
fn reconstruction_defects(m: &HermitianMatrix) -> (f64, f64) {
    let n = m.dim();
    let (values, vectors) = eigh(m).unwrap();
    let mut residual: f64 = 0.0;
    for (lambda, v) in values.iter().zip(&vectors) {
        for j in 0..n {
            let av: C64 = (0..n).map(|k| m.get(j, k) * v[k]).sum();
            residual = residual.max((av - v[j] * lambda).norm());
        }
    }
    let mut ortho: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let dot: C64 = (0..n).map(|k| vectors[a][k].conj() * vectors[b][k]).sum();
            let want = if a == b { 1.0 } else { 0.0 };
            ortho = ortho.max((dot - want).norm());
        }
    }
    (residual, ortho)
}

#[test]
fn jacobi_reconstructs_random_matrices_in_every_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for dim in 2..=MAX_DIM {
        for i in 0..1000 {
            let m = random_hermitian(&mut rng, dim, i % 3 == 0, if i % 2 == 0 { 0.0 } else { 0.6 });
            let values = eigenvalues(&m).unwrap();
            assert!(values.windows(2).all(|w| w[0] <= w[1]));
            // invariants: trace and Frobenius norm
            let sum: f64 = values.iter().sum();
            let sq: f64 = values.iter().map(|v| v * v).sum();
            assert!((sum - m.trace()).abs() < 1e-11 * dim as f64);
            assert!((sq.sqrt() - m.frobenius_norm()).abs() < 1e-11 * dim as f64);
            let fast = min_eigenvalue(&m).unwrap();
            assert!((fast - values[0]).abs() < 1e-10, "dim {dim}: {fast} vs {}", values[0]);
            if i % 10 == 0 {
                let (res, ortho) = reconstruction_defects(&m);
                assert!(
                    res < 1e-10 && ortho < 1e-10,
                    "dim {dim}: residual {res}, orthogonality {ortho}"
                );
            }
        }
    }
}

#[test]
fn two_by_two_matches_quadratic_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let m = random_hermitian(&mut rng, 2, false, 0.0);
        let (a, d, b) = (m.get(0, 0).re, m.get(1, 1).re, m.get(0, 1));
        let tr = a + d;
        let det = a * d - b.norm_sqr();
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let v = eigenvalues(&m).unwrap();
        assert!((v[0] - (tr / 2.0 - disc)).abs() < 1e-12);
        assert!((v[1] - (tr / 2.0 + disc)).abs() < 1e-12);
    }
}

#[test]
fn degenerate_spectra_keep_orthonormal_vectors() {
    // identity plus a rank-one perturbation: eigenvalue 1 with multiplicity dim-1
    for dim in [3, 5, 8, 16] {
        let mut m = HermitianMatrix::identity(dim).unwrap();
        let u: Vec<C64> = (0..dim).map(|k| C64::new(1.0, k as f64 * 0.1)).collect();
        for j in 0..dim {
            for k in j..dim {
                let v = m.get(j, k) + u[j] * u[k].conj() * 0.25;
                if j == k {
                    m.set_diagonal(j, v.re);
                } else {
                    m.set(j, k, v);
                }
            }
        }
        let (res, ortho) = reconstruction_defects(&m);
        assert!(res < 1e-12 && ortho < 1e-12, "dim {dim}");
    }
}

proptest! {
    #[test]
    fn shift_moves_spectrum(dim in 2usize..=8, seed in any::<u64>(), shift in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_hermitian(&mut rng, dim, false, 0.3);
        let mut shifted = m.clone();
        shifted.scale_add(shift, &HermitianMatrix::identity(dim).unwrap()).unwrap();
        let a = eigenvalues(&m).unwrap();
        let b = eigenvalues(&shifted).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x + shift - y).abs() < 1e-12);
        }
    }

    #[test]
    fn transpose_is_isospectral(dim in 2usize..=10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_hermitian(&mut rng, dim, false, 0.0);
        let a = eigenvalues(&m).unwrap();
        let b = eigenvalues(&m.transpose()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}
