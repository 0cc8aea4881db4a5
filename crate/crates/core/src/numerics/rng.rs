//! Seeded, splittable random streams on ChaCha8.
//!
//! A [`SeedSpec`] names one stream; Monte Carlo work is cut into fixed-size blocks
//! and block `b` draws from ChaCha stream `(spec.stream << 32) | b`. Block boundaries
//! never depend on the worker count, so results are reproducible across machines.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha8Rng;

/// Replications per Monte Carlo block.
pub const MC_BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SeedSpec {
    pub seed: u64,
    pub stream: u32,
}

impl SeedSpec {
    pub fn new(seed: u64, stream: u32) -> Self {
        SeedSpec { seed, stream }
    }

    pub fn rng(&self) -> StreamRng {
        block_rng(*self, 0)
    }

    /// A different stream under the same seed.
    pub fn with_stream(&self, stream: u32) -> Self {
        SeedSpec { seed: self.seed, stream }
    }
}

/// Generator for Monte Carlo block `block` of `spec`.
pub fn block_rng(spec: SeedSpec, block: u32) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(((spec.stream as u64) << 32) | block as u64);
    rng
}

/// `n` independent fair signs.
pub fn rademacher_stream(spec: SeedSpec, n: usize) -> Vec<i8> {
    let mut rng = spec.rng();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let bits = rng.next_u64();
        let take = (n - out.len()).min(64);
        out.extend((0..take).map(|k| if (bits >> k) & 1 == 1 { 1i8 } else { -1i8 }));
    }
    out
}

/// Sum of `n` fair signs drawn from `rng`.
pub fn rademacher_sum<R: RngCore>(rng: &mut R, n: usize) -> i64 {
    let mut ones = 0u64;
    let mut left = n;
    while left >= 64 {
        ones += rng.next_u64().count_ones() as u64;
        left -= 64;
    }
    if left > 0 {
        let mask = (1u64 << left) - 1;
        ones += (rng.next_u64() & mask).count_ones() as u64;
    }
    2 * ones as i64 - n as i64
}

/// Uniform draw in [0, 1) with 53 random bits.
pub fn uniform01<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Index drawn from a finite law given by its cumulative probabilities.
pub fn draw_index<R: RngCore>(rng: &mut R, cumulative: &[f64]) -> usize {
    let u = uniform01(rng) * cumulative.last().copied().unwrap_or(1.0);
    cumulative.iter().position(|&c| u < c).unwrap_or(cumulative.len() - 1)
}

pub fn cumulative(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// Runs `per_block(rng, count)` over `reps` replications split into [`MC_BLOCK`]-sized
/// blocks, concatenating the results in block order.
pub fn run_blocks<T, F>(spec: SeedSpec, reps: usize, per_block: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng, usize) -> Vec<T> + Sync + Send,
{
    let blocks = reps.div_ceil(MC_BLOCK);
    let chunks = crate::parallel::map_indexed(blocks, |b| {
        let count = MC_BLOCK.min(reps - b * MC_BLOCK);
        let mut rng = block_rng(spec, b as u32);
        per_block(&mut rng, count)
    });
    chunks.into_iter().flatten().collect()
}
