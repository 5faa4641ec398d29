//! Deterministic random streams. Every consumer derives its generator from a
//! root seed plus a stream id, so adding a consumer never shifts another's
//! sequence.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn derive_seed(seed: u64, id: u64) -> u64 {
    stream(seed, id).next_u64()
}

/// Stream ids used across the crate.
pub mod streams {
    pub const INIT: u64 = 1;
    pub const SPLIT: u64 = 2;
    pub const SHUFFLE_PAIRED: u64 = 3;
    pub const SHUFFLE_X: u64 = 4;
    pub const SHUFFLE_Y: u64 = 5;
    pub const SIT_PARAMS: u64 = 6;
    pub const TEXTURE: u64 = 7;
    pub const LANDMARKS: u64 = 8;
    pub const PRETRAIN: u64 = 9;
}
