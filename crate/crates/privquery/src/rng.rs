//! Seeded random-number streams.
//!
//! One master seed drives the whole artifact. Every concurrent unit of work
//! (a session role, a Monte Carlo query, an attack trial batch) gets its own
//! ChaCha substream derived from `(master seed, domain, index)`, so results
//! are bit-reproducible regardless of thread scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent consumers of randomness. The domain keeps substreams apart
/// even when two components use the same index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    DaveSource = 1,
    UrsulaMeasurement = 2,
    Query = 3,
    Database = 4,
    AttackTrials = 5,
    Scenario = 6,
}

/// A deterministic substream for `(seed, domain, index)`.
///
/// ChaCha exposes 2^64 independent streams per key; we partition that space
/// as `domain << 56 | index`, which leaves room for 2^56 work units per
/// domain.
pub fn substream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    assert!(index < 1 << 56, "substream index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((domain as u64) << 56 | index);
    rng
}
