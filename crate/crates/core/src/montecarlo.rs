//! Monte Carlo estimation of `np_k` for permutation groups.
//!
//! Samples are split into fixed-size chunks; chunk `i` draws from a
//! ChaCha8 stream seeded with [`substream_seed`]`(seed, i)`. Hit counts are
//! summed, so results depend on `(seed, samples, chunk_size)` only.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::perm::{PermGroupBSGS, Permutation};

pub const DEFAULT_Z: f64 = 1.96;
pub const DEFAULT_CHUNK_SIZE: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub k: usize,
    pub hits: u64,
    pub samples: u64,
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub z: f64,
    pub seed: u64,
    pub chunk_size: u64,
}

impl EstimateResult {
    pub fn covers(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed for sub-stream `stream` of master seed `seed` (SplitMix64 mixing).
pub fn substream_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_add(0x5eed)))
}

pub fn substream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, stream))
}

/// Wilson score interval, clamped to `[0, 1]`.
pub fn wilson_ci(hits: u64, samples: u64, z: f64) -> Result<(f64, f64)> {
    if samples == 0 || hits > samples {
        return Err(Error::InvalidCounts(format!("{hits} hits out of {samples} samples")));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::InvalidCounts(format!("z must be positive, got {z}")));
    }
    let n = samples as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if hits == samples { 1.0 } else { (center + half).min(1.0) };
    Ok((low, high))
}

fn tuple_is_trivial(g: &PermGroupBSGS, k: usize, rng: &mut ChaCha8Rng) -> bool {
    let mut acc: Permutation = g.random_uniform(rng);
    for _ in 0..k {
        let x = g.random_uniform(rng);
        acc = acc.commutator(&x);
    }
    acc.is_identity()
}

pub fn estimate_np(g: &PermGroupBSGS, k: usize, samples: u64, seed: u64, z: f64) -> Result<EstimateResult> {
    estimate_np_chunked(g, k, samples, seed, z, DEFAULT_CHUNK_SIZE)
}

pub fn estimate_np_chunked(
    g: &PermGroupBSGS,
    k: usize,
    samples: u64,
    seed: u64,
    z: f64,
    chunk_size: u64,
) -> Result<EstimateResult> {
    if samples == 0 {
        return Err(Error::InvalidCounts("samples must be at least 1".into()));
    }
    if k == 0 {
        return Err(Error::InvalidDefinition("k must be at least 1".into()));
    }
    if chunk_size == 0 {
        return Err(Error::InvalidCounts("chunk size must be at least 1".into()));
    }
    let chunks = samples.div_ceil(chunk_size);
    let hits = par::map_reduce(
        chunks as usize,
        || 0u64,
        |c| {
            let c = c as u64;
            let n = chunk_size.min(samples - c * chunk_size);
            let mut rng = substream_rng(seed, c);
            (0..n).filter(|_| tuple_is_trivial(g, k, &mut rng)).count() as u64
        },
        |a, b| a + b,
    );
    let (ci_low, ci_high) = wilson_ci(hits, samples, z)?;
    Ok(EstimateResult {
        k,
        hits,
        samples,
        point: hits as f64 / samples as f64,
        ci_low,
        ci_high,
        z,
        seed,
        chunk_size,
    })
}
