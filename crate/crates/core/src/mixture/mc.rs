//! Monte Carlo reference for the mixture tail.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Fraction of `n_draws` simulated `Σ λ_k z_k²` exceeding `q`.
pub fn mc_oracle(lambdas: &[f64], q: f64, n_draws: usize, seed: u64) -> f64 {
    mc_oracle_many(lambdas, &[q], n_draws, seed)[0]
}

/// Same as [`mc_oracle`] for several thresholds on one set of draws.
pub fn mc_oracle_many(lambdas: &[f64], thresholds: &[f64], n_draws: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = vec![0usize; thresholds.len()];
    for _ in 0..n_draws {
        let mut q = 0.0;
        for &l in lambdas {
            let z: f64 = rng.sample(StandardNormal);
            q += l * z * z;
        }
        for (h, &t) in hits.iter_mut().zip(thresholds) {
            if q > t {
                *h += 1;
            }
        }
    }
    hits.into_iter().map(|h| h as f64 / n_draws as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases() {
        assert_eq!(mc_oracle(&[1.0], 0.0, 10_000, 3), 1.0);
        let p = mc_oracle(&[1.0, -1.0], 0.0, 200_000, 11);
        assert!((p - 0.5).abs() < 0.005, "{p}");
        assert_eq!(mc_oracle(&[2.0, 1.0], 1.5, 20_000, 5), mc_oracle(&[2.0, 1.0], 1.5, 20_000, 5));
    }
}
