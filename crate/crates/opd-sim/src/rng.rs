//! Deterministic random streams. Every simulation purpose draws from its own
//! ChaCha stream so that toggling one feature never shifts another's draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Arrivals = 1,
    Registration = 2,
    Consult = 3,
    Drift = 4,
    Dataset = 10,
    History = 11,
}

pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
