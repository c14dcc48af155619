use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRIAL_DOMAIN: u64 = 0x7472_6961_6c73_0001;
const FAMILY_DOMAIN: u64 = 0x6661_6d69_6c79_0001;

fn key(seed: u64, domain: u64) -> [u8; 32] {
    let mut k = [0u8; 32];
    k[..8].copy_from_slice(&seed.to_le_bytes());
    k[8..16].copy_from_slice(&domain.to_le_bytes());
    k
}

/// Per-trial random stream keyed by `(seed, trial index)`.
///
/// Backed by ChaCha8 with the trial index as the stream id, so trial `i` draws the same
/// numbers regardless of which thread runs it or in which order trials are scheduled.
#[derive(Debug, Clone)]
pub struct TrialStream {
    rng: ChaCha8Rng,
    seed: u64,
    index: u64,
}

impl TrialStream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::from_seed(key(seed, TRIAL_DOMAIN));
        rng.set_stream(index);
        TrialStream { rng, seed, index }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

/// Generator for random matrix families, in a key space disjoint from trial streams.
pub fn family_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(key(seed, FAMILY_DOMAIN))
}
