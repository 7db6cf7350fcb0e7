//! Deterministic RNG streams.
//!
//! Every randomized component takes a `u64` seed and derives per-stream
//! generators from it, so the same (seed, stream index) pair always replays
//! the same sequence regardless of how many other streams ran in between.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; decorrelates nearby integer inputs.
pub fn split_mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// RNG for a labelled stream. `path` identifies the stream (domain tag,
/// stream index, ...); the same seed and path always yield the same RNG.
pub fn stream_rng(seed: u64, path: &[u64]) -> ChaCha8Rng {
    let mut state = split_mix(seed);
    for &part in path {
        state = split_mix(state ^ split_mix(part));
    }
    ChaCha8Rng::seed_from_u64(state)
}

/// Standard normal draw via Box–Muller.
pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > f64::MIN_POSITIVE {
            let v: f64 = rng.gen();
            return (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos();
        }
    }
}
