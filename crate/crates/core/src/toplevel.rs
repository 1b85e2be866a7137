//! The two-phase algorithms: NoisyOR and NoisyMax.

use rand::Rng;

use crate::error::{Error, Result};
use crate::oracles::{BitOracle, ComparisonOracle, StreamPurpose, TrialKey};
use crate::primitives::{check_bit, noisy_compare};
use crate::scalar::{in_open_half, Real};
use crate::tournaments::{tournament_max, tournament_or};

/// Which argument of `max(log n, n δ log(1/δ))` is larger.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdRegime {
    /// `n δ log(1/δ)` dominates (the `δ >= 1/n` side).
    Linear,
    /// `log n` dominates (the `δ < 1/n` side).
    Logarithmic,
}

/// Candidate count at which NoisyOR answers 1 without a tournament.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrThreshold<T> {
    pub n: usize,
    pub delta: T,
    pub value: T,
    pub regime: ThresholdRegime,
}

impl<T: Real> OrThreshold<T> {
    pub fn new(n: usize, delta: T) -> Self {
        let nf = T::from_usize(n).expect("n representable");
        let log_term = nf.ln();
        let linear_term = nf * delta * (T::one() / delta).ln();
        let (value, regime) = if linear_term >= log_term {
            (linear_term, ThresholdRegime::Linear)
        } else {
            (log_term, ThresholdRegime::Logarithmic)
        };
        Self {
            n,
            delta,
            value,
            regime,
        }
    }

    pub fn is_met_by(&self, candidates: usize) -> bool {
        T::from_usize(candidates).expect("count representable") >= self.value
    }
}

/// How NoisyOR reached its answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrPath {
    /// No bit survived the first pass; answered 0.
    NoCandidates,
    /// Enough bits survived to answer 1 outright.
    ThresholdMet,
    /// A tournament over the survivors decided.
    Tournament,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrOutcome<T> {
    pub value: bool,
    /// Indices whose first-pass CheckBit returned 1.
    pub selected: Vec<usize>,
    pub threshold: OrThreshold<T>,
    pub path: OrPath,
    pub phase1_queries: u64,
    pub subroutine_queries: u64,
}

impl<T> OrOutcome<T> {
    pub fn total_queries(&self) -> u64 {
        self.phase1_queries + self.subroutine_queries
    }
}

fn check_params<T: Real>(delta: T, p: T) -> Result<()> {
    if !in_open_half(p) {
        return Err(Error::contract(format!("p = {p} must lie in (0, 1/2)")));
    }
    if !in_open_half(delta) {
        return Err(Error::contract(format!("delta = {delta} must lie in (0, 1/2)")));
    }
    Ok(())
}

/// Computes the OR of all bits behind `oracle` with worst-case error at most
/// `2 δ`.
///
/// Every bit gets one CheckBit at tolerance `δ`, in index order. With no
/// positives the answer is 0; with at least `max(log n, n δ log(1/δ))`
/// positives it is 1; otherwise a tournament over the positives decides.
pub fn noisy_or<O, T>(oracle: &mut O, delta: T, p: T) -> Result<OrOutcome<T>>
where
    O: BitOracle + ?Sized,
    T: Real,
{
    check_params(delta, p)?;
    let n = oracle.len();
    if n == 0 {
        return Err(Error::contract("noisy_or needs n >= 1"));
    }
    let start = oracle.queries();
    let mut selected = Vec::new();
    for i in 0..n {
        if check_bit(oracle, i, delta, p)?.decision {
            selected.push(i);
        }
    }
    let phase1_queries = oracle.queries() - start;
    let threshold = OrThreshold::new(n, delta);

    let (value, path, subroutine_queries) = if selected.is_empty() {
        (false, OrPath::NoCandidates, 0)
    } else if threshold.is_met_by(selected.len()) {
        (true, OrPath::ThresholdMet, 0)
    } else {
        let report = tournament_or(oracle, &selected, delta, p)?;
        (report.output, OrPath::Tournament, report.queries_used)
    };
    Ok(OrOutcome {
        value,
        selected,
        threshold,
        path,
        phase1_queries,
        subroutine_queries,
    })
}

/// The first-phase sample of NoisyMax and its complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    pub selected: Vec<usize>,
    pub complement: Vec<usize>,
    /// How many draws came out empty before this one.
    pub redraws: u32,
}

/// Inclusion probability `1 / log n`, clamped to 1.
pub fn sampling_probability<T: Real>(n: usize) -> T {
    let ln_n = T::from_usize(n).expect("n representable").ln();
    if ln_n <= T::one() {
        T::one()
    } else {
        T::one() / ln_n
    }
}

/// Includes each index independently with [`sampling_probability`],
/// redrawing until the sample is nonempty.
pub fn draw_sample<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> SampleSet {
    assert!(n >= 1, "sample from an empty index set");
    let q = sampling_probability::<T>(n).as_f64();
    let mut redraws = 0;
    loop {
        let (selected, complement): (Vec<usize>, Vec<usize>) =
            (0..n).partition(|_| rng.random::<f64>() < q);
        if !selected.is_empty() {
            return SampleSet {
                selected,
                complement,
                redraws,
            };
        }
        redraws += 1;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxOutcome {
    pub index: usize,
    pub sample: SampleSet,
    /// Winner of the tournament over the sample.
    pub sample_winner: usize,
    /// The sample winner followed by every complement element that beat it.
    pub finalists: Vec<usize>,
    /// Queries spent comparing the sample winner against the complement.
    pub phase1_queries: u64,
    /// Queries spent in the two tournaments.
    pub subroutine_queries: u64,
}

impl MaxOutcome {
    pub fn total_queries(&self) -> u64 {
        self.phase1_queries + self.subroutine_queries
    }
}

/// Finds the index of the maximum with worst-case error at most `3 δ`.
///
/// `rng` drives the sampling step only; channel noise lives in the oracle.
pub fn noisy_max<O, T, R>(oracle: &mut O, delta: T, p: T, rng: &mut R) -> Result<MaxOutcome>
where
    O: ComparisonOracle + ?Sized,
    T: Real,
    R: Rng + ?Sized,
{
    check_params(delta, p)?;
    let n = oracle.len();
    if n == 0 {
        return Err(Error::contract("noisy_max needs n >= 1"));
    }
    let sample = draw_sample::<T, R>(n, rng);

    let first = tournament_max(oracle, &sample.selected, delta, p)?;
    let sample_winner = first.output;

    let before = oracle.queries();
    let mut finalists = vec![sample_winner];
    for &u in &sample.complement {
        if noisy_compare(oracle, sample_winner, u, delta, p)?.decision {
            finalists.push(u);
        }
    }
    let phase1_queries = oracle.queries() - before;

    let second = tournament_max(oracle, &finalists, delta, p)?;
    Ok(MaxOutcome {
        index: second.output,
        sample,
        sample_winner,
        finalists,
        phase1_queries,
        subroutine_queries: first.queries_used + second.queries_used,
    })
}

/// [`noisy_max`] with the sampling stream derived from `key`.
pub fn noisy_max_keyed<O, T>(oracle: &mut O, delta: T, p: T, key: TrialKey) -> Result<MaxOutcome>
where
    O: ComparisonOracle + ?Sized,
    T: Real,
{
    let mut rng = key.rng(StreamPurpose::Algorithm);
    noisy_max(oracle, delta, p, &mut rng)
}
