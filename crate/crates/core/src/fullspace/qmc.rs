//! The R_d low-discrepancy sequence with Cranley-Patterson rotations.
//!
//! Point `k` of the sequence in dimension `d` is `frac(s + k * alpha)` with
//! `alpha_j = phi_d^-(j+1)`, where `phi_d` is the positive root of
//! `x^(d+1) = x + 1`. Coordinates are kept as 64-bit fixed-point fractions,
//! so the recurrence is exact (wrapping addition) for any `k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn generalized_golden_ratio(d: usize) -> f64 {
    let mut x: f64 = 2.0;
    for _ in 0..200 {
        x = (1.0 + x).powf(1.0 / (d as f64 + 1.0));
    }
    x
}

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

/// One randomly shifted copy of the R_d sequence.
#[derive(Clone, Debug)]
pub struct ShiftedRd {
    step: Vec<u64>,
    state: Vec<u64>,
}

impl ShiftedRd {
    /// `shift_rng` supplies the uniform rotation.
    pub fn new(dim: usize, shift_rng: &mut ChaCha8Rng) -> Self {
        let phi = generalized_golden_ratio(dim);
        let step = (0..dim)
            .map(|j| {
                let alpha = phi.powi(-(j as i32 + 1)).fract();
                (alpha * TWO_POW_64) as u64
            })
            .collect();
        let state = (0..dim).map(|_| shift_rng.gen::<u64>()).collect();
        Self { step, state }
    }

    pub fn dim(&self) -> usize {
        self.step.len()
    }

    /// Writes the next point into `out`, coordinates in `[0, 1)`.
    pub fn next_into(&mut self, out: &mut [f64]) {
        for ((s, st), o) in self.state.iter_mut().zip(&self.step).zip(out.iter_mut()) {
            *o = (*s >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            *s = s.wrapping_add(*st);
        }
    }
}

/// Independent generator for randomization `index` of a run seeded `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratios() {
        assert!((generalized_golden_ratio(1) - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14);
        let p = generalized_golden_ratio(2);
        assert!((p.powi(3) - p - 1.0).abs() < 1e-14);
    }

    #[test]
    fn equidistributed_in_each_coordinate() {
        let mut rng = stream_rng(7, 0);
        let mut seq = ShiftedRd::new(5, &mut rng);
        let n = 4096;
        let mut x = [0.0; 5];
        let mut sums = [0.0; 5];
        for _ in 0..n {
            seq.next_into(&mut x);
            for j in 0..5 {
                assert!((0.0..1.0).contains(&x[j]));
                sums[j] += x[j];
            }
        }
        for s in sums {
            assert!((s / n as f64 - 0.5).abs() < 2e-3);
        }
    }
}
