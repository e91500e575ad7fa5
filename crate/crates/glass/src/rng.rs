//! Seeded random number generation with a pinned, portable algorithm.
//!
//! All stochastic choices in the library (crop positions, shuffles, dropout
//! masks, parameter init, synthetic textures) flow through [`SeedRng`], a
//! thin wrapper over the ChaCha8 stream cipher RNG. ChaCha8 produces the
//! same byte stream for the same seed on every platform, which is what the
//! reproducibility contract of the whole crate rests on.
//!
//! Independent substreams are derived with [`SeedRng::substream`], using
//! ChaCha's native 64-bit stream counter, so e.g. every image in a dataset
//! can get its own generator from `(master seed, image index)` without any
//! draw-order coupling between images.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone)]
pub struct SeedRng {
    inner: ChaCha8Rng,
}

impl SeedRng {
    pub fn new(seed: u64) -> Self {
        SeedRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent generator for substream `stream` of `seed`.
    ///
    /// Distinct `stream` values yield statistically independent sequences;
    /// the mapping is deterministic in `(seed, stream)`.
    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        SeedRng { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `[0, bound)`, unbiased.
    ///
    /// Uses threshold rejection: draws are retried while they fall in the
    /// final partial block of the 2^64 range, so every residue is equally
    /// likely.
    pub fn int_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "int_below bound must be positive");
        // Largest x such that [0, x] covers a whole number of blocks of `bound`.
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }

    /// Uniform integer in the inclusive range `[lo, hi]`.
    pub fn int_in(&mut self, lo: usize, hi: usize) -> usize {
        assert!(lo <= hi, "int_in requires lo <= hi");
        lo + self.int_below((hi - lo + 1) as u64) as usize
    }

    /// Uniform float in `[0, 1)` with 53 bits of precision.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw via the Box-Muller transform.
    ///
    /// Consumes exactly two uniforms per call; the sine branch is discarded
    /// to keep the draw count fixed and the stream easy to reason about.
    pub fn normal_f64(&mut self) -> f64 {
        let u1 = 1.0 - self.unit_f64(); // (0, 1], keeps ln finite
        let u2 = self.unit_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Fisher-Yates shuffle of the whole slice.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.int_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// Partial Fisher-Yates: after the call, `items[..k]` holds a uniform
    /// random `k`-subset of the original slice, in uniform random order.
    pub fn partial_shuffle<T>(&mut self, items: &mut [T], k: usize) {
        let n = items.len();
        assert!(k <= n, "cannot select {k} items from {n}");
        for i in 0..k {
            let j = self.int_in(i, n - 1);
            items.swap(i, j);
        }
    }
}
