//! Splittable counter-based pseudo-random generator.
//!
//! Every random decision in the crate (split shuffles, fold shuffles, GOSS
//! draws) goes through [`CounterRng`], so that any implementation following
//! the algorithm below reproduces identical plans and models.
//!
//! # Algorithm
//!
//! The generator is SplitMix64 expressed as a keyed counter:
//!
//! ```text
//! GAMMA = 0x9E37_79B9_7F4A_7C15
//! mix(z):  z = (z ^ (z >> 30)) * 0xBF58_476D_1CE4_E5B9
//!          z = (z ^ (z >> 27)) * 0x94D0_49BB_1331_11EB
//!          return z ^ (z >> 31)                (all arithmetic mod 2^64)
//!
//! next():  counter += 1
//!          return mix(key + counter * GAMMA)
//! ```
//!
//! A generator is created from a 64-bit seed with `key = seed`, `counter = 0`.
//! `fork(tag)` derives an independent child stream without consuming any
//! output of the parent: `child.key = mix(key ^ mix(tag + GAMMA))`,
//! `child.counter = 0`.
//!
//! `below(m)` draws an unbiased integer in `[0, m)` by rejection: draw
//! `x = next()`, let `r = x mod m`; accept when `x - r <= 2^64 - m`, otherwise
//! draw again.
//!
//! `shuffle` is the descending Fisher-Yates shuffle: for `i` from `len - 1`
//! down to `1`, swap positions `i` and `below(i + 1)`.
//!
//! `next_f64` returns `(next() >> 11) * 2^-53`, uniform on `[0, 1)`.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream tags used to derive per-stage generators from one top-level seed.
pub mod stream {
    pub const SPLIT: u64 = 1;
    pub const FOLD: u64 = 2;
    pub const GOSS: u64 = 3;
    pub const SYNTHETIC: u64 = 4;
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng {
            key: seed,
            counter: 0,
        }
    }

    /// Child stream identified by `tag`. The parent is left untouched.
    pub fn fork(&self, tag: u64) -> Self {
        CounterRng {
            key: mix(self.key ^ mix(tag.wrapping_add(GAMMA))),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)`. Panics if `bound == 0`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below() needs a positive bound");
        loop {
            let x = self.next_u64();
            let r = x % bound;
            if x - r <= bound.wrapping_neg() {
                return r;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// Standard normal deviate (Box-Muller, cosine branch only).
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
