//! Seed derivation for reproducible Monte Carlo runs.
//!
//! All randomness in the crate flows from a single user-visible 64-bit
//! master seed through a two-level splitting scheme:
//!
//! 1. each experiment (toy trials, bomb tests, event trials, ...) owns a
//!    fixed *stream* constant, and
//! 2. each trial index within an experiment derives its own seed, from
//!    which a fresh [`ChaCha8Rng`] is built.
//!
//! Because a trial's generator depends only on `(master, stream, index)`,
//! tallies are identical no matter how trials are partitioned across
//! threads, and identical runs are byte-for-byte reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream constants, one per experiment that consumes randomness.
pub mod stream {
    pub const TOY: u64 = 0x01;
    pub const IFM: u64 = 0x02;
    pub const EVENTS: u64 = 0x03;
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective avalanche mix on 64 bits.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed for one trial of one experiment stream.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let stream_seed = mix(master ^ stream.wrapping_mul(GOLDEN_GAMMA));
    mix(stream_seed ^ index.wrapping_mul(GOLDEN_GAMMA))
}

/// Build the generator for one trial.
pub fn trial_rng(master: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream, index))
}

/// Split `0..n` into at most `threads` contiguous chunks for scoped workers.
///
/// The chunking never affects results (each trial derives its own seed);
/// it only caps the worker count.
pub fn chunk_ranges(n: u64, threads: usize) -> Vec<std::ops::Range<u64>> {
    let workers = threads.max(1) as u64;
    let workers = workers.min(n.max(1));
    let base = n / workers;
    let extra = n % workers;
    let mut ranges = Vec::with_capacity(workers as usize);
    let mut start = 0;
    for w in 0..workers {
        let len = base + u64::from(w < extra);
        ranges.push(start..start + len);
        start += len;
    }
    ranges
}
