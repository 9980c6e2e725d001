//! Counter-based seed derivation.
//!
//! Every random stream in an experiment is seeded by
//! `derive_seed(master, stream, index)`: the master seed, a stream tag and a
//! counter are folded through SplitMix64 one word at a time. Work units never
//! share an RNG, so results do not depend on scheduling.

/// Stream tag for channel realizations; `index` is the realization number.
pub const CHANNEL_STREAM: u64 = 1;
/// Stream tag for receiver noise; `index` is the realization number, so every
/// sweep point and pilot scheme of a realization sees the same noise draws.
pub const NOISE_STREAM: u64 = 2;

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index)
}

pub fn channel_seed(master: u64, realization: usize) -> u64 {
    derive_seed(master, CHANNEL_STREAM, realization as u64)
}

pub fn noise_seed(master: u64, realization: usize) -> u64 {
    derive_seed(master, NOISE_STREAM, realization as u64)
}
