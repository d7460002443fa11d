//! Seedable, platform-independent random streams.
//!
//! Each stream is a ChaCha20 block cipher keyed from a 64-bit seed and
//! addressed by a 64-bit stream index, so independent substreams
//! `(seed, index)` can be handed to worker threads without coordination.
//! Gaussian pairs come from the Box–Muller transform, which consumes exactly
//! two 64-bit words per pair; stream position after `n` draws is therefore
//! known in advance.

use std::f64::consts::TAU;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

/// Recorded in run manifests next to the seed.
pub const GENERATOR_ID: &str = "chacha20(rand_chacha-0.9,seed_from_u64,stream)+box-muller";

/// Stream-index namespaces, keeping substreams of different consumers apart.
pub mod namespace {
    pub const PHANTOM_ROWS: u64 = 1 << 40;
    pub const HIST_BLOCKS: u64 = 2 << 40;
    pub const GENERAL: u64 = 3 << 40;
}

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

pub struct NoiseStream {
    rng: ChaCha20Rng,
}

impl NoiseStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        NoiseStream { rng }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * INV_2_53
    }

    /// Two independent standard normal variates.
    #[inline]
    pub fn normal_pair(&mut self) -> (f64, f64) {
        // 1 - U lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        (r * c, r * s)
    }
}
