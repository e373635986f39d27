//! Counter-keyed random streams for reproducible trajectory sampling.
//!
//! A [`Stream`] is addressed by `(seed, key)` and yields draws addressed by
//! their position, so any draw is a pure function of
//! `(seed, key, draw index)`. Trajectory samplers key one stream per
//! trajectory index, which makes results independent of worker count and
//! evaluation order. ChaCha12 in stream mode provides the counter structure;
//! the 64-bit seed is expanded to the 256-bit cipher key with SplitMix64.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// A deterministic stream of draws, keyed by `(seed, key)`.
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha12Rng,
}

impl Stream {
    pub fn new(seed: u64, key: u64) -> Self {
        let mut state = seed;
        let mut bytes = [0u8; 32];
        for chunk in bytes.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha12Rng::from_seed(bytes);
        rng.set_stream(key);
        Self { rng }
    }

    /// Stream for one Monte Carlo trajectory.
    pub fn for_trajectory(seed: u64, trajectory: u64) -> Self {
        Self::new(seed, trajectory)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn normal_vector(&mut self, len: usize) -> DVector<f64> {
        DVector::from_fn(len, |_, _| self.standard_normal())
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
