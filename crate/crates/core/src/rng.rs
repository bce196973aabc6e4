//! Seed splitting.
//!
//! Every random draw in the crate comes from a `ChaCha8Rng` seeded with the
//! run's master seed and positioned on a stream id
//!
//! ```text
//! stream = purpose << 56 | major << 28 | minor
//! ```
//!
//! where `purpose` names the consumer, `major` is usually an iteration or epoch,
//! and `minor` a particle or sample index. Each (particle, iteration) pair owns
//! its stream, so draws do not depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    SwarmInit = 1,
    SwarmStep = 2,
    AnsatzInit = 3,
    EpochShuffle = 4,
    Shots = 5,
    Subset = 6,
    Synthetic = 7,
}

const FIELD: u64 = 1 << 28;

pub fn stream_rng(seed: u64, purpose: Purpose, major: u64, minor: u64) -> ChaCha8Rng {
    debug_assert!(major < FIELD && minor < FIELD);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose as u64) << 56 | (major % FIELD) << 28 | (minor % FIELD));
    rng
}
