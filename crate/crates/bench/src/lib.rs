//! Fixtures shared by the benchmarks.

use flashici_core::channel::simulate_wordline;
use flashici_core::DeviceParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random MLC word-line read of `n` cells at the given operating point.
pub fn random_read(params: &DeviceParams, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = params.q();
    let victims: Vec<usize> = (0..n).map(|_| rng.random_range(0..q)).collect();
    let aggressors: Vec<usize> = (0..n).map(|_| rng.random_range(0..q)).collect();
    simulate_wordline(params, &victims, &aggressors, &mut rng)
        .expect("valid word-line")
        .y
}
