//! Seekable random numbers.
//!
//! Draws come from ChaCha8 keyed by the seed, with the stream index selecting
//! the ChaCha stream. Draw `c` is the `c`-th `u64` of that stream, so
//! `(seed, stream, counter) -> value` is a pure, platform-independent
//! function and can be evaluated out of order.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StandardUniform};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    base: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self::derive(seed, 0)
    }

    /// Independent stream `stream` under `seed`.
    pub fn derive(seed: u64, stream: u64) -> Self {
        let mut base = ChaCha8Rng::seed_from_u64(seed);
        base.set_stream(stream);
        Self { base }
    }

    fn seek(&self, counter: u64) -> ChaCha8Rng {
        let mut r = self.base.clone();
        // Two 32-bit words per draw.
        r.set_word_pos(2 * counter as u128);
        r
    }

    pub fn u64_at(&self, counter: u64) -> u64 {
        self.seek(counter).next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn f64_at(&self, counter: u64) -> f64 {
        StandardUniform.sample(&mut self.seek(counter))
    }

    /// Uniform index in `0..n` by multiply-shift.
    pub fn index_at(&self, counter: u64, n: usize) -> usize {
        to_index(self.u64_at(counter), n)
    }

    /// Sequential view starting at counter 0.
    pub fn stream(self) -> CounterStream {
        self.stream_at(0)
    }

    /// Sequential view starting at `counter`.
    pub fn stream_at(&self, counter: u64) -> CounterStream {
        CounterStream {
            rng: self.seek(counter),
        }
    }
}

#[inline]
fn to_index(u: u64, n: usize) -> usize {
    ((u as u128 * n as u128) >> 64) as usize
}

/// Sequential reader over a [`CounterRng`].
#[derive(Debug, Clone)]
pub struct CounterStream {
    rng: ChaCha8Rng,
}

impl CounterStream {
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn next_f64(&mut self) -> f64 {
        StandardUniform.sample(&mut self.rng)
    }

    pub fn next_index(&mut self, n: usize) -> usize {
        to_index(self.next_u64(), n)
    }

    /// Standard normal (ziggurat); consumes a variable number of draws.
    pub fn next_gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Counter of the next draw.
    pub fn position(&self) -> u64 {
        (self.rng.get_word_pos() / 2) as u64
    }
}
