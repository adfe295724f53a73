//! Seeded randomness.
//!
//! Every stochastic choice in the protocols draws from a caller-supplied
//! RNG. [`seeded`] returns ChaCha20 keyed by `seed_from_u64`, which is
//! portable across platforms and releases of `rand_chacha`, so a seed
//! fully determines a query.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type ProtocolRng = ChaCha20Rng;

pub fn seeded(seed: u64) -> ProtocolRng {
    ChaCha20Rng::seed_from_u64(seed)
}
