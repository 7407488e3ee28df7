//! Deterministic parallel Monte Carlo driver.
//!
//! Work is split into fixed-size chunks; each chunk gets its own ChaCha
//! stream derived from the master seed, and the per-chunk partials are
//! reduced in chunk order. Results are therefore identical for any thread
//! count, including 1.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub(crate) const CHUNK: u64 = 1 << 16;

/// Runs `body(chunk_len, rng)` over `total` samples and returns the ordered
/// per-chunk partials.
pub(crate) fn run_chunks<T, F>(total: u64, seed: u64, body: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx + 1);
            let len = CHUNK.min(total - idx * CHUNK);
            body(len, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn partials_are_deterministic_and_ordered() {
        let sum = |total, seed| -> f64 {
            run_chunks(total, seed, |len, rng| {
                (0..len).map(|_| rng.random::<f64>()).sum::<f64>()
            })
            .into_iter()
            .sum()
        };
        let a = sum(200_000, 7);
        let b = sum(200_000, 7);
        assert_eq!(a, b);
        assert_ne!(a, sum(200_000, 8));
    }

    #[test]
    fn chunk_lengths_cover_total() {
        let lens = run_chunks(CHUNK * 2 + 123, 1, |len, _| len);
        assert_eq!(lens.iter().sum::<u64>(), CHUNK * 2 + 123);
        assert_eq!(lens.len(), 3);
    }
}
