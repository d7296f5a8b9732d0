//! Seeded reservoir sampling (Algorithm R).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fixed-capacity uniform sample over a stream.
#[derive(Debug)]
pub struct Reservoir<T> {
    capacity: usize,
    seen: u64,
    items: Vec<T>,
    rng: ChaCha8Rng,
}

impl<T> Reservoir<T> {
    pub fn new(capacity: usize, seed: u64) -> Self {
        Self {
            capacity,
            seen: 0,
            items: Vec::with_capacity(capacity.min(1 << 20)),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn offer(&mut self, item: T) {
        self.seen += 1;
        if self.items.len() < self.capacity {
            self.items.push(item);
            return;
        }
        let j = self.rng.random_range(0..self.seen);
        if (j as usize) < self.capacity {
            self.items[j as usize] = item;
        }
    }

    pub fn seen(&self) -> u64 {
        self.seen
    }

    pub fn into_items(self) -> Vec<T> {
        self.items
    }
}

/// Uniform sample of `min(k, len)` items, reproducible for a given seed.
///
/// Items come back in reservoir order; callers that write files sort them.
pub fn sample_pairs<T, I>(items: I, k: usize, seed: u64) -> Vec<T>
where
    I: IntoIterator<Item = T>,
{
    assert!(k >= 1, "sample size must be positive");
    let mut reservoir = Reservoir::new(k, seed);
    for item in items {
        reservoir.offer(item);
    }
    reservoir.into_items()
}
