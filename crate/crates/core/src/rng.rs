//! Seeded random streams.
//!
//! Every operation that consumes randomness draws from a [`SeedStream`]
//! derived from `(master_seed, source_index)`. Streams are independent per
//! source, so parallel render schedules cannot change the output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mix a master seed with a stream index into a single 64-bit seed.
///
/// splitmix64 finalizer; avalanches both inputs so that neighbouring
/// source indices produce unrelated streams.
pub fn derive_seed(master_seed: u64, stream: u64) -> u64 {
    let mut z = master_seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A deterministic random stream.
#[derive(Debug, Clone)]
pub struct SeedStream {
    rng: ChaCha8Rng,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Stream for source `index` under `master_seed`.
    pub fn for_source(master_seed: u64, index: u64) -> Self {
        Self::new(derive_seed(master_seed, index))
    }

    /// Uniform sample in `[-1, 1]`.
    pub fn bipolar(&mut self) -> f64 {
        self.rng.gen_range(-1.0..=1.0)
    }

    /// Uniform sample in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform phase in `[0, 2*pi)`.
    pub fn phase(&mut self) -> f64 {
        self.unit() * std::f64::consts::TAU
    }
}
