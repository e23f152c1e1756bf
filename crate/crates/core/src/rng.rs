//! Seeded random streams.
//!
//! Every stochastic step draws from its own ChaCha8 stream whose seed is
//! derived from a master seed and a list of integer keys (generation,
//! offspring index, trial index, ...). Mixing uses the SplitMix64
//! finalizer:
//!
//! ```text
//! h0 = mix(master ^ 0x9E3779B97F4A7C15)
//! h(k+1) = mix(h(k) ^ mix(key(k) + 0x9E3779B97F4A7C15))
//! ```
//!
//! so a stream depends only on `(master, keys)` and never on the order in
//! which other streams were consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(mix64(master ^ GOLDEN_GAMMA), |h, &k| {
        mix64(h ^ mix64(k.wrapping_add(GOLDEN_GAMMA)))
    })
}

pub fn substream(master: u64, keys: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(master, keys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = substream(7, &[1, 2]).sample_iter(rand::distributions::Standard).take(4).collect();
        let b: Vec<u64> = substream(7, &[1, 2]).sample_iter(rand::distributions::Standard).take(4).collect();
        let c: Vec<u64> = substream(7, &[2, 1]).sample_iter(rand::distributions::Standard).take(4).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(derive_seed(1, &[]), derive_seed(2, &[]));
    }
}
