//! Randomness for the query channel.
//!
//! Every trial gets its own ChaCha8 stream keyed by `(master_seed,
//! trial_index)`, so a trial's draws do not depend on which other trials ran
//! first or on how many worker threads were used. Each answered query
//! consumes exactly one draw.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrialKey {
    pub master_seed: u64,
    pub trial_index: u64,
}

/// Distinct consumers of randomness inside one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamPurpose {
    ChannelNoise = 1,
    /// Internal coin flips of an algorithm (the NoisyMax sampling step).
    Algorithm = 2,
}

impl TrialKey {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        Self {
            master_seed,
            trial_index,
        }
    }

    pub fn rng(&self, purpose: StreamPurpose) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        seed[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(self.trial_index);
        rng
    }
}

/// A scripted sequence of flip indicators: `true` flips the corresponding
/// answer, `false` lets the truth through.
///
/// Once the script runs out, the `tail` value is used for every further
/// answer; without a tail the oracle reports [`Error::ScriptExhausted`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ForcedResponseStream {
    script: Vec<bool>,
    cursor: usize,
    tail: Option<bool>,
}

impl ForcedResponseStream {
    pub fn new(flips: Vec<bool>) -> Self {
        Self {
            script: flips,
            cursor: 0,
            tail: None,
        }
    }

    /// Every answer is the truth.
    pub fn truthful() -> Self {
        Self::new(Vec::new()).then(false)
    }

    pub fn then(mut self, tail: bool) -> Self {
        self.tail = Some(tail);
        self
    }

    pub fn consumed(&self) -> usize {
        self.cursor
    }

    fn next_flip(&mut self) -> Result<bool> {
        let flip = match self.script.get(self.cursor) {
            Some(&f) => f,
            None => self.tail.ok_or(Error::ScriptExhausted {
                consumed: self.cursor,
            })?,
        };
        self.cursor += 1;
        Ok(flip)
    }
}

#[derive(Clone, Debug)]
pub enum NoiseSource {
    Seeded(ChaCha8Rng),
    Forced(ForcedResponseStream),
}

impl NoiseSource {
    pub fn seeded(key: TrialKey) -> Self {
        NoiseSource::Seeded(key.rng(StreamPurpose::ChannelNoise))
    }

    pub fn forced(stream: ForcedResponseStream) -> Self {
        NoiseSource::Forced(stream)
    }

    #[inline]
    pub(crate) fn next_flip(&mut self, p: f64) -> Result<bool> {
        match self {
            NoiseSource::Seeded(rng) => Ok(rng.random::<f64>() < p),
            NoiseSource::Forced(stream) => stream.next_flip(),
        }
    }
}
