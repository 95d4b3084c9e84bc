//! Seeding conventions. Every random stream is a xoshiro256** generator
//! seeded through SplitMix64 from a 64-bit seed; per-item seeds come from
//! [`mix`].

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

pub type Rng = Xoshiro256StarStar;

/// Recorded in dataset headers so other implementations can reproduce files.
pub const PRNG_NAME: &str = "xoshiro256** seeded via SplitMix64; mix = splitmix64(seed + counter * 0x9E3779B97F4A7C15)";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function. A bijection on `u64`.
fn splitmix64_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of item `counter` from a stream seed. Injective in
/// `counter` for a fixed `seed`.
pub fn mix(seed: u64, counter: u64) -> u64 {
    splitmix64_finalize(seed.wrapping_add(counter.wrapping_mul(GOLDEN_GAMMA)))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Uniform in `[0, 1)` with 53 random bits.
pub fn unit_f64(rng: &mut Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in `[lo, hi]` (inclusive) for reals.
pub fn uniform_f64(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        lo + (hi - lo) * unit_f64(rng)
    }
}

/// Uniform integer in `[lo, hi]` inclusive.
pub fn uniform_usize(rng: &mut Rng, lo: usize, hi: usize) -> usize {
    let span = (hi - lo + 1) as f64;
    lo + ((unit_f64(rng) * span) as usize).min(hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn mix_is_injective_over_counters() {
        let seeds: HashSet<u64> = (0..100_000).map(|c| mix(7, c)).collect();
        assert_eq!(seeds.len(), 100_000);
    }

    #[test]
    fn unit_range() {
        let mut r = rng_from_seed(3);
        for _ in 0..10_000 {
            let u = unit_f64(&mut r);
            assert!((0.0..1.0).contains(&u));
            let k = uniform_usize(&mut r, 3, 9);
            assert!((3..=9).contains(&k));
        }
    }

    #[test]
    fn uniform_usize_covers_range() {
        let mut r = rng_from_seed(11);
        let mut hits = [0usize; 7];
        for _ in 0..70_000 {
            hits[uniform_usize(&mut r, 3, 9) - 3] += 1;
        }
        assert!(hits.iter().all(|&h| (9_000..11_000).contains(&h)), "{hits:?}");
    }
}
