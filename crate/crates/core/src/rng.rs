//! Deterministic random streams.
//!
//! Every stochastic operation in the library draws from an [`RngStream`],
//! a counter-based ChaCha8 generator: the same seed yields the same
//! sequence of uniform and Gaussian draws on every platform. Suites derive
//! one independent stream per run from a base seed, so runs can execute in
//! any order (or in parallel) without changing results.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Fixed odd stride used to derive per-run seeds from a base seed.
pub const RUN_SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seeded random stream with uniform and Gaussian draws.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    pub fn next_uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform draw in `[lo, hi)`; returns `lo` exactly when `lo == hi`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        if lo == hi {
            return lo;
        }
        lo + self.next_uniform() * (hi - lo)
    }

    /// Standard normal draw.
    pub fn next_gaussian(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}

/// Seed for run `k` of a repeated suite: `base ^ (k * RUN_SEED_STRIDE)`.
pub fn run_seed(base_seed: u64, run_index: u64) -> u64 {
    base_seed ^ run_index.wrapping_mul(RUN_SEED_STRIDE)
}

/// Seed for run `k` of a given (algorithm, objective) cell.
///
/// The cell labels are folded in with FNV-1a so cells are independent of
/// suite execution order; two cells with identical labels (an algorithm
/// compared against itself) share seeds by construction.
pub fn cell_seed(base_seed: u64, algorithm: &str, objective: &str, run_index: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in algorithm.bytes().chain([0x1f]).chain(objective.bytes()) {
        h ^= u64::from(byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    run_seed(base_seed ^ h, run_index)
}
