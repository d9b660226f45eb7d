//! Seeded randomness.
//!
//! All generators are `Xoshiro256PlusPlus` seeded through SplitMix64
//! (`SeedableRng::seed_from_u64`). Uniform doubles take the top 53 bits of a
//! `u64` (`(x >> 11) * 2^-53`, in `[0, 1)`), and standard normals come from
//! the Box–Muller transform, cosine branch first, sine branch cached for the
//! next draw. Sub-streams (instance `j`, run `r`, ...) get their own seed from
//! [`derive_seed`], so results do not depend on generation order.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};

pub type Rng = Xoshiro256PlusPlus;

/// Mixes a parent seed with a stream index into an independent child seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut sm = SplitMix64::seed_from_u64(seed ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    sm.next_u64()
}

/// Generator for `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> Rng {
    Rng::seed_from_u64(derive_seed(seed, stream))
}

pub fn uniform(rng: &mut Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal deviates via Box–Muller.
#[derive(Debug, Clone)]
pub struct Gaussian {
    rng: Rng,
    spare: Option<f64>,
}

impl Gaussian {
    pub fn new(rng: Rng) -> Self {
        Self { rng, spare: None }
    }

    pub fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - u keeps the radius argument in (0, 1]
        let u1 = 1.0 - uniform(&mut self.rng);
        let u2 = uniform(&mut self.rng);
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}
