//! Counter-based pseudo-random streams.
//!
//! Output `i` of a stream with seed `s` is `mix(s + (i + 1) * 0x9E3779B97F4A7C15)`,
//! where `mix` is the splitmix64 finalizer. This is exactly the splitmix64
//! sequence started from state `s`, so for `s = 0` the first outputs are
//! `0xE220A8397B1DCDAF`, `0x6E789E6AA1B965F4`, `0x06C45D188009454F`.
//!
//! Substreams are keyed by a 64-bit label: `substream(label)` has seed
//! `mix(s ^ mix(label + 0x9E3779B97F4A7C15))`. Trials, graph samples and
//! embeddings each draw from their own labelled substream, so results do not
//! depend on evaluation order or thread scheduling.

use crate::ffield::{Fp, MODULUS};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 finalizer.
#[inline]
pub const fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the substream of `seed` with the given label.
#[inline]
pub const fn derive_seed(seed: u64, label: u64) -> u64 {
    mix64(seed ^ mix64(label.wrapping_add(GOLDEN)))
}

/// Substream labels used across the workspace.
pub mod labels {
    pub const GRAPH: u64 = 0x6772_6170_68; // "graph"
    pub const EMBEDDING: u64 = 0x656d_6265_64; // "embed"
    pub const BOOTSTRAP: u64 = 0x626f_6f74; // "boot"
    pub const CLOSURE: u64 = 0x636c_6f73; // "clos"
    pub const SUBSET: u64 = 0x7375_6273; // "subs"
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    counter: u64,
}

impl RngStream {
    pub const fn new(seed: u64) -> Self {
        RngStream { seed, counter: 0 }
    }

    pub const fn seed(&self) -> u64 {
        self.seed
    }

    pub const fn counter(&self) -> u64 {
        self.counter
    }

    /// A fresh stream whose seed mixes this stream's seed with `label`.
    /// The parent's counter is irrelevant.
    pub const fn substream(&self, label: u64) -> RngStream {
        RngStream::new(derive_seed(self.seed, label))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.seed.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, bound)`; `bound` must be positive.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        // Lemire's multiply-shift with rejection
        let zone = bound.wrapping_neg() % bound;
        loop {
            let m = self.next_u64() as u128 * bound as u128;
            if (m as u64) >= zone {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform element of `F_q` by rejection on 61-bit words.
    #[inline]
    pub fn next_field(&mut self) -> Fp {
        loop {
            let v = self.next_u64() >> 3;
            if v < MODULUS {
                return Fp::new(v);
            }
        }
    }
}
