//! Problem instances and the noisy query channel.

mod instance;
mod ledger;
mod noise;

pub use instance::{make_instance_max, make_instance_or, BitInstance, MaxFamily, OrFamily, ValueInstance};
pub use ledger::QueryLedger;
pub use noise::{ForcedResponseStream, NoiseSource, StreamPurpose, TrialKey};

use crate::error::{Error, Result};
use crate::scalar::{in_open_half, Real};

/// Noisy reads of individual bits.
pub trait BitOracle {
    fn len(&self) -> usize;
    fn read_bit(&mut self, i: usize) -> Result<bool>;
    /// Queries answered so far.
    fn queries(&self) -> u64;
}

/// Noisy answers to "is `values[i] < values[j]`?".
pub trait ComparisonOracle {
    fn len(&self) -> usize;
    fn compare(&mut self, i: usize, j: usize) -> Result<bool>;
    fn queries(&self) -> u64;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Query {
    Read(usize),
    Compare(usize, usize),
}

/// One answered query as seen by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryRecord {
    pub query: Query,
    pub answer: bool,
}

/// Binary symmetric channel in front of a hidden instance.
///
/// Each answer is the true answer XOR an independent Bernoulli(`p`) flip.
/// The ledger is updated before the answer is returned.
#[derive(Clone, Debug)]
pub struct NoisyOracle<I, T> {
    instance: I,
    p: T,
    p_f64: f64,
    noise: NoiseSource,
    ledger: QueryLedger,
    transcript: Option<Vec<QueryRecord>>,
}

impl<I: HasLen, T: Real> NoisyOracle<I, T> {
    /// Production constructor: `p` must lie in (0, 1/2).
    pub fn new(instance: I, p: T, noise: NoiseSource) -> Result<Self> {
        if !in_open_half(p) {
            return Err(Error::contract(format!(
                "crossover probability p = {p} must lie in (0, 1/2)"
            )));
        }
        Ok(Self::build(instance, p, noise))
    }

    /// Seeded oracle for trial `key`.
    pub fn seeded(instance: I, p: T, key: TrialKey) -> Result<Self> {
        Self::new(instance, p, NoiseSource::seeded(key))
    }

    /// Test channel: additionally admits `p = 0` (a noiseless channel).
    pub fn test_channel(instance: I, p: T, noise: NoiseSource) -> Result<Self> {
        if !(p >= T::zero() && p < T::lit(0.5)) {
            return Err(Error::contract(format!(
                "test channel p = {p} must lie in [0, 1/2)"
            )));
        }
        Ok(Self::build(instance, p, noise))
    }

    fn build(instance: I, p: T, noise: NoiseSource) -> Self {
        let n = instance.instance_len();
        Self {
            instance,
            p,
            p_f64: p.as_f64(),
            noise,
            ledger: QueryLedger::new(n),
            transcript: None,
        }
    }

    /// Keep a record of every answered query.
    pub fn with_transcript(mut self) -> Self {
        self.transcript = Some(Vec::new());
        self
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn instance(&self) -> &I {
        &self.instance
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn transcript(&self) -> Option<&[QueryRecord]> {
        self.transcript.as_deref()
    }

    fn answer(&mut self, query: Query, truth: bool) -> Result<bool> {
        let flip = self.noise.next_flip(self.p_f64)?;
        match query {
            Query::Read(i) => self.ledger.record_read(i),
            Query::Compare(i, j) => self.ledger.record_pair(i, j),
        }
        let answer = truth ^ flip;
        if let Some(t) = self.transcript.as_mut() {
            t.push(QueryRecord { query, answer });
        }
        Ok(answer)
    }
}

/// Instances know their length.
pub trait HasLen {
    fn instance_len(&self) -> usize;
}

impl HasLen for BitInstance {
    fn instance_len(&self) -> usize {
        self.len()
    }
}

impl<T: Real> HasLen for ValueInstance<T> {
    fn instance_len(&self) -> usize {
        self.len()
    }
}

impl<T: Real> BitOracle for NoisyOracle<BitInstance, T> {
    fn len(&self) -> usize {
        self.instance.len()
    }

    fn read_bit(&mut self, i: usize) -> Result<bool> {
        let truth = self.instance.bit(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.instance.len(),
        })?;
        self.answer(Query::Read(i), truth)
    }

    fn queries(&self) -> u64 {
        self.ledger.total()
    }
}

impl<V: Real, T: Real> ComparisonOracle for NoisyOracle<ValueInstance<V>, T> {
    fn len(&self) -> usize {
        self.instance.len()
    }

    fn compare(&mut self, i: usize, j: usize) -> Result<bool> {
        let len = self.instance.len();
        for index in [i, j] {
            if index >= len {
                return Err(Error::IndexOutOfRange { index, len });
            }
        }
        if i == j {
            return Err(Error::contract(format!("cannot compare element {i} with itself")));
        }
        let truth = self.instance.less(i, j);
        self.answer(Query::Compare(i, j), truth)
    }

    fn queries(&self) -> u64 {
        self.ledger.total()
    }
}
