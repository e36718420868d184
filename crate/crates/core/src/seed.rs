//! Deterministic seed derivation.
//!
//! Every random decision in the library draws from a [`rand_chacha::ChaCha8Rng`]
//! whose seed is derived from the master seed plus a structural position
//! (domain tag, iteration number, universe index, ...). Seeds never depend on
//! execution order or thread scheduling, which is what makes `--threads N`
//! produce byte-identical results for every N.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags keep unrelated random streams separated even when their
/// positional arguments collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    ValidationSplit = 1,
    SubsetDraw = 2,
    CandidateSample = 3,
    SvmShuffle = 4,
    PoolDownsample = 5,
    UniverseSample = 6,
    Session = 7,
    Mode = 8,
    SynthNoise = 9,
    SynthSignal = 10,
    SynthLabels = 11,
    SynthDrift = 13,
    SynthArtifact = 14,
    SynthDistractor = 15,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with a sequence of positional tags into a new seed.
pub fn derive(base: u64, domain: Domain, tags: &[u64]) -> u64 {
    let mut h = splitmix64(base ^ 0xD6E8_FEB8_6659_FD93);
    h = splitmix64(h ^ domain as u64);
    for &t in tags {
        h = splitmix64(h ^ t);
    }
    h
}

/// A ChaCha stream seeded at a structural position.
pub fn rng(base: u64, domain: Domain, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(base, domain, tags))
}

/// In-place Fisher-Yates shuffle with our own loop so the byte-level behavior
/// is pinned by this crate rather than by a dependency's implementation.
pub fn shuffle<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    use rand::Rng;
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// Draws `k` distinct indices from `0..n` (partial Fisher-Yates). Order of the
/// returned indices is the draw order; callers sort if they need canonical
/// order. Panics if `k > n`.
pub fn sample_indices(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    use rand::Rng;
    assert!(k <= n, "sample_indices: k > n");
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}
