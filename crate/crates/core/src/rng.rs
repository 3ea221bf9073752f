//! Deterministic random streams.
//!
//! Every sampler is driven by ChaCha20 (`rand_chacha::ChaCha20Rng`), seeded
//! with `SeedableRng::seed_from_u64(seed)`. Independent sub-streams (one per
//! optimizer restart, per measurement setting, ...) select the ChaCha stream
//! id with `set_stream`, so the keystream for `(seed, stream)` is fixed by
//! the ChaCha20 definition alone.
//!
//! Uniform variates take the top 53 bits of a `u64` draw (`(x >> 11) · 2⁻⁵³`),
//! and Gaussians use Box–Muller on a pair of such uniforms. Neither depends on
//! a distribution crate's internals, which keeps golden outputs portable.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::qmath::C64;

pub type SimRng = ChaCha20Rng;

/// 64-bit seed. Same seed, same stream.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> SimRng {
        SimRng::seed_from_u64(self.0)
    }

    /// Generator for the independent sub-stream `stream` of this seed.
    pub fn stream(self, stream: u64) -> SimRng {
        let mut rng = self.rng();
        rng.set_stream(stream);
        rng
    }
}

impl From<u64> for RngSeed {
    fn from(s: u64) -> Self {
        RngSeed(s)
    }
}

/// Uniform on [0, 1).
#[inline]
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on [lo, hi).
#[inline]
pub fn uniform_in<R: RngCore + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

/// Standard complex Gaussian with independent N(0, 1) real and imaginary parts.
pub fn complex_normal<R: RngCore + ?Sized>(rng: &mut R) -> C64 {
    let u1 = uniform(rng);
    let u2 = uniform(rng);
    let radius = (-2.0 * (1.0 - u1).ln()).sqrt();
    C64::from_polar(radius, std::f64::consts::TAU * u2)
}

/// Exponential(1) variate.
pub fn exponential<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    -(1.0 - uniform(rng)).ln()
}

/// Flat Dirichlet(1, ..., 1) weights of length `k`.
pub fn flat_dirichlet<R: RngCore + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k).map(|_| exponential(rng)).collect();
    let total: f64 = w.iter().sum();
    for x in w.iter_mut() {
        *x /= total;
    }
    w
}
