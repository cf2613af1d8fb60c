//! Deterministic partitioning of sampling work.
//!
//! Sample budgets are cut into fixed-size chunks; chunk `i` always uses a
//! generator derived from `(seed, i)`, so merged results are independent of
//! how many worker threads actually ran the chunks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Samples per chunk. Fixed so that chunk boundaries never depend on the
/// thread count.
pub const CHUNK: usize = 512;

/// Generator for task `stream` of a campaign seeded with `seed`.
pub fn derived_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f` over `total` items split into [`CHUNK`]-sized pieces on up to
/// `threads` workers, returning per-chunk outputs in chunk order.
pub fn run_chunked<T, F>(total: usize, threads: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, Range<usize>, &mut ChaCha8Rng) -> T + Sync,
{
    let chunks = total.div_ceil(CHUNK);
    if chunks == 0 {
        return Vec::new();
    }
    let mut slots: Vec<Option<T>> = Vec::with_capacity(chunks);
    slots.resize_with(chunks, || None);
    let slots = Mutex::new(slots);
    let next = AtomicUsize::new(0);
    let workers = threads.max(1).min(chunks);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= chunks {
                    break;
                }
                let lo = i * CHUNK;
                let hi = ((i + 1) * CHUNK).min(total);
                let mut rng = derived_rng(seed, i as u64);
                let out = f(i, lo..hi, &mut rng);
                slots.lock().expect("worker panicked")[i] = Some(out);
            });
        }
    });

    slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|o| o.expect("chunk not processed"))
        .collect()
}

/// Runs `f` once per index on up to `threads` workers; index `i` sees the
/// generator derived from `(seed, i)`. Outputs come back in index order.
pub fn run_indexed<T, F>(count: usize, threads: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync,
{
    if count == 0 {
        return Vec::new();
    }
    let mut slots: Vec<Option<T>> = Vec::with_capacity(count);
    slots.resize_with(count, || None);
    let slots = Mutex::new(slots);
    let next = AtomicUsize::new(0);
    let workers = threads.max(1).min(count);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let mut rng = derived_rng(seed, i as u64);
                let out = f(i, &mut rng);
                slots.lock().expect("worker panicked")[i] = Some(out);
            });
        }
    });

    slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|o| o.expect("index not processed"))
        .collect()
}
