//! Seeded, splittable random streams.
//!
//! Every stream is a ChaCha8 generator seeded from the base seed and
//! positioned on its own 64-bit stream id, so stream `k` can be replayed
//! without touching any other stream. Normal variates use the Ziggurat
//! sampler from `rand_distr`, which only needs `libm` and is bit-stable
//! across platforms.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

pub use rand_chacha::ChaCha8Rng as StreamRng;

pub fn stream(seed: u64, key: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key);
    rng
}

#[inline]
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn fill_normal(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    for v in out {
        *v = StandardNormal.sample(rng);
    }
}
