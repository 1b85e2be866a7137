//! Ground-truth inputs and the adversarial instance families used by the
//! lower-bound constructions.
//!
//! Family parameters (`SingleOne(j)`, `Relocated(i)`) are 1-based positions,
//! following the way those instances are usually written down. Everything
//! else in the crate indexes from zero.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A bit vector whose OR is to be computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitInstance {
    bits: Vec<bool>,
}

impl BitInstance {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::contract("bit instance must have length >= 1"));
        }
        Ok(Self { bits })
    }

    /// Builds from 0/1 integers; any other value is rejected.
    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        let bits = digits
            .iter()
            .map(|&d| match d {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::contract(format!("bit value {other} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bit(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    /// OR of the bits.
    pub fn truth(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }

    pub fn to_digits(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| b as u8).collect()
    }
}

/// A vector of pairwise-distinct reals whose argmax is to be found.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueInstance<T> {
    values: Vec<T>,
    argmax: usize,
}

impl<T: Real> ValueInstance<T> {
    /// Rejects empty input, NaN, and ties.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::contract("value instance must have length >= 1"));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::contract("value instance contains NaN"));
        }
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN filtered"));
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::contract(format!(
                "value instance has a tie at {}; values must be pairwise distinct",
                w[0]
            )));
        }
        let argmax = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("NaN filtered"))
            .map(|(i, _)| i)
            .expect("nonempty");
        Ok(Self { values, argmax })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Zero-based index of the unique maximum.
    pub fn truth(&self) -> usize {
        self.argmax
    }

    /// Whether `values[i] < values[j]`.
    pub fn less(&self, i: usize, j: usize) -> bool {
        self.values[i] < self.values[j]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrFamily {
    AllZero,
    /// A single 1 at the given 1-based position.
    SingleOne(usize),
    Literal(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum MaxFamily<T> {
    /// `(1, 2, ..., n)`.
    Sorted,
    /// The sorted sequence with its maximum moved to the given 1-based
    /// position `i ∈ [1, n-1]`: `(1, ..., i-1, n, i, ..., n-1)`.
    Relocated(usize),
    /// A uniformly random permutation of `(1, ..., n)` drawn from the seed.
    Permuted(u64),
    Literal(Vec<T>),
}

pub fn make_instance_or(family: &OrFamily, n: usize) -> Result<BitInstance> {
    if n == 0 {
        return Err(Error::contract("n must be >= 1"));
    }
    match family {
        OrFamily::AllZero => BitInstance::new(vec![false; n]),
        OrFamily::SingleOne(j) => {
            if *j < 1 || *j > n {
                return Err(Error::contract(format!("single_one position {j} not in [1, {n}]")));
            }
            let mut bits = vec![false; n];
            bits[j - 1] = true;
            BitInstance::new(bits)
        }
        OrFamily::Literal(bits) => {
            if bits.len() != n {
                return Err(Error::contract(format!(
                    "literal has length {} but n = {n}",
                    bits.len()
                )));
            }
            BitInstance::new(bits.clone())
        }
    }
}

pub fn make_instance_max<T: Real>(family: &MaxFamily<T>, n: usize) -> Result<ValueInstance<T>> {
    if n == 0 {
        return Err(Error::contract("n must be >= 1"));
    }
    let ranks = |n: usize| (1..=n).map(|k| T::from_usize(k).expect("rank representable"));
    match family {
        MaxFamily::Sorted => ValueInstance::new(ranks(n).collect()),
        MaxFamily::Relocated(i) => {
            if *i < 1 || *i + 1 > n {
                return Err(Error::contract(format!(
                    "relocated position {i} not in [1, {}]",
                    n.saturating_sub(1)
                )));
            }
            let mut values: Vec<T> = ranks(n - 1).collect();
            values.insert(i - 1, T::from_usize(n).expect("rank representable"));
            ValueInstance::new(values)
        }
        MaxFamily::Permuted(seed) => {
            let mut values: Vec<T> = ranks(n).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            values.shuffle(&mut rng);
            ValueInstance::new(values)
        }
        MaxFamily::Literal(values) => {
            if values.len() != n {
                return Err(Error::contract(format!(
                    "literal has length {} but n = {n}",
                    values.len()
                )));
            }
            ValueInstance::new(values.clone())
        }
    }
}
