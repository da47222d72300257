//! Seeded random streams.
//!
//! Every stochastic routine draws from `rand_chacha::ChaCha8Rng` seeded with
//! `ChaCha8Rng::seed_from_u64(seed)` and then switched to an independent
//! stream with `set_stream(k)`, where `k` is the index of the unit of work
//! (a bootstrap replicate, a permutation, a restart, a block of samples).
//! Uniform reals are `rng.gen::<f64>()` (53 random mantissa bits) and
//! integer ranges use `rng.gen_range`, both from `rand` 0.8. Because each
//! unit of work owns its stream, results do not depend on how the work is
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives a child seed so nested procedures (a learner inside a bootstrap
/// replicate) get streams distinct from their caller's.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    substream(seed, index.wrapping_add(1 << 63)).next_u64()
}

/// Runs `f` on a pool capped at `threads` workers, or on the global pool
/// when `None`.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(t) if t > 0 => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

/// Worker cap from the `PGM_THREADS` environment variable, if set and valid.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("PGM_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
}
