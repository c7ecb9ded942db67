//! Deterministic stream derivation.
//!
//! Every randomized component draws from a ChaCha8 stream derived from a
//! master seed plus a path of integer identifiers (repetition, round,
//! realization, ...). Parallel and serial execution therefore produce
//! identical results, and any run is replayable from its logged seed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator family used throughout; recorded in reports.
pub const GENERATOR: &str = "chacha8";

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a seekable stream from `seed` and a path of identifiers.
///
/// Distinct paths give statistically independent streams; the same path
/// always gives the same stream.
pub fn stream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    let mut state = splitmix64(seed ^ 0x51ed_27da_9f1c_55a1);
    for &id in path {
        state = splitmix64(state ^ splitmix64(id.wrapping_add(0xd6e8_feb8_6659_fd93)));
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn same_path_same_stream() {
        let mut a = stream(42, &[1, 2, 3]);
        let mut b = stream(42, &[1, 2, 3]);
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn distinct_paths_diverge() {
        let mut a = stream(42, &[1, 2, 3]);
        let mut b = stream(42, &[1, 2, 4]);
        let mut c = stream(43, &[1, 2, 3]);
        let x = a.next_u64();
        assert_ne!(x, b.next_u64());
        assert_ne!(x, c.next_u64());
    }

    #[test]
    fn path_nesting_is_not_concatenation() {
        // [1, 2] under seed s must differ from [1] under a seed derived from 2.
        let mut a = stream(7, &[1, 2]);
        let mut b = stream(7, &[12]);
        assert_ne!(a.next_u64(), b.next_u64());
    }
}
