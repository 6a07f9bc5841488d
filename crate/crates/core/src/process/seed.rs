use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Master seed from which independent substreams are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed {
    pub master: u64,
}

impl Seed {
    pub const fn new(master: u64) -> Self {
        Self { master }
    }

    fn digest(&self, replicate: u64, tag: &str) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(self.master.to_le_bytes());
        h.update(replicate.to_le_bytes());
        h.update((tag.len() as u64).to_le_bytes());
        h.update(tag.as_bytes());
        h.finalize().into()
    }

    /// Generator for substream `(replicate, tag)`.
    pub fn rng(&self, replicate: u64, tag: &str) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.digest(replicate, tag))
    }

    /// A child seed, for handing a substream to a nested component.
    pub fn derive(&self, replicate: u64, tag: &str) -> Seed {
        let d = self.digest(replicate, tag);
        Seed { master: u64::from_le_bytes(d[..8].try_into().unwrap()) }
    }
}

impl From<u64> for Seed {
    fn from(master: u64) -> Self {
        Seed { master }
    }
}
