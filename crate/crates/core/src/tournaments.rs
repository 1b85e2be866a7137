//! Knockout tournaments over noisy primitives.
//!
//! Round `i` (1-based) runs every match at tolerance `δ^(2(2i-1))`. Survivors
//! are paired positionally, `(y1, y2), (y3, y4), ...`; an odd survivor count
//! carries the last element into the next round without a match.

use crate::error::{Error, Result};
use crate::oracles::{BitOracle, ComparisonOracle};
use crate::primitives::{
    check_bit_with_threshold, noisy_compare_with_threshold, vote_threshold,
    vote_threshold_from_ln,
};
use crate::scalar::{in_open_half, Real};

/// Per-round error tolerances of a tournament with base tolerance `δ`.
///
/// Tolerances are carried as logarithms; `δ^(2(2i-1))` leaves the normal
/// float range quickly for small `δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundSchedule<T> {
    base_delta: T,
    ln_delta: T,
}

impl<T: Real> RoundSchedule<T> {
    pub fn new(base_delta: T) -> Result<Self> {
        if !in_open_half(base_delta) {
            return Err(Error::contract(format!(
                "tournament delta = {base_delta} must lie in (0, 1/2)"
            )));
        }
        Ok(Self {
            base_delta,
            ln_delta: base_delta.ln(),
        })
    }

    pub fn base_delta(&self) -> T {
        self.base_delta
    }

    /// Number of pairing rounds for `r` candidates: `⌈log2 r⌉`.
    pub fn rounds(r: usize) -> usize {
        if r <= 1 {
            0
        } else {
            (usize::BITS - (r - 1).leading_zeros()) as usize
        }
    }

    /// The exponent `2(2i-1)` applied to `δ` in round `i`.
    pub fn exponent(round: usize) -> u64 {
        assert!(round >= 1, "rounds are numbered from 1");
        2 * (2 * round as u64 - 1)
    }

    pub fn ln_round_error(&self, round: usize) -> T {
        T::from_count(Self::exponent(round)) * self.ln_delta
    }

    /// `δ^(2(2i-1))`; may underflow to zero.
    pub fn round_error(&self, round: usize) -> T {
        match i32::try_from(Self::exponent(round)) {
            Ok(e) => self.base_delta.powi(e),
            Err(_) => T::zero(),
        }
    }

    /// Vote threshold for matches in `round`.
    pub fn threshold(&self, round: usize, p: T) -> Result<u64> {
        let direct = self.round_error(round);
        if direct.is_normal() {
            vote_threshold(p, direct)
        } else {
            vote_threshold_from_ln(p, self.ln_round_error(round))
        }
    }
}

/// Survivors of a knockout bracket, as original indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    survivors: Vec<usize>,
    round: usize,
}

impl Bracket {
    pub fn new(indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::contract("tournament needs at least one candidate"));
        }
        Ok(Self {
            survivors: indices.to_vec(),
            round: 0,
        })
    }

    pub fn survivors(&self) -> &[usize] {
        &self.survivors
    }

    /// Rounds completed so far.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.survivors.chunks_exact(2).map(|c| (c[0], c[1]))
    }

    /// Replaces the survivors with one winner per pair plus the bye, if any.
    pub fn advance(&mut self, winners: Vec<usize>) {
        debug_assert_eq!(winners.len(), self.survivors.len() / 2);
        let bye = (self.survivors.len() % 2 == 1).then(|| *self.survivors.last().unwrap());
        self.survivors = winners;
        self.survivors.extend(bye);
        self.round += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundRecord<T> {
    pub round: usize,
    pub ln_tolerance: T,
    pub threshold: u64,
    pub matches: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TournamentReport<D, T> {
    pub output: D,
    pub queries_used: u64,
    pub rounds: Vec<RoundRecord<T>>,
    /// Threshold of the closing CheckBit (OR tournaments only).
    pub final_threshold: Option<u64>,
}

fn check_inputs<T: Real>(indices: &[usize], len: usize, p: T) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::contract("tournament needs at least one candidate"));
    }
    if !in_open_half(p) {
        return Err(Error::contract(format!("p = {p} must lie in (0, 1/2)")));
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= len) {
        return Err(Error::IndexOutOfRange { index: bad, len });
    }
    Ok(())
}

/// Estimates the OR of the bits at `indices`, error probability at most `delta`.
///
/// Each match checks only the first element of its pair: a 1 keeps the
/// first, a 0 keeps the second. The last survivor is checked once more at
/// the base tolerance and that answer is returned.
pub fn tournament_or<O, T>(
    oracle: &mut O,
    indices: &[usize],
    delta: T,
    p: T,
) -> Result<TournamentReport<bool, T>>
where
    O: BitOracle + ?Sized,
    T: Real,
{
    let schedule = RoundSchedule::new(delta)?;
    check_inputs(indices, oracle.len(), p)?;
    let start = oracle.queries();
    let mut bracket = Bracket::new(indices)?;
    let mut rounds = Vec::new();
    for round in 1..=RoundSchedule::<T>::rounds(indices.len()) {
        let threshold = schedule.threshold(round, p)?;
        let pairs: Vec<_> = bracket.pairs().collect();
        let mut winners = Vec::with_capacity(pairs.len());
        for &(first, second) in &pairs {
            let a = check_bit_with_threshold(oracle, first, p, threshold)?;
            winners.push(if a.decision { first } else { second });
        }
        rounds.push(RoundRecord {
            round,
            ln_tolerance: schedule.ln_round_error(round),
            threshold,
            matches: pairs.len(),
        });
        bracket.advance(winners);
    }
    debug_assert_eq!(bracket.survivors().len(), 1);
    let last = bracket.survivors()[0];
    let final_threshold = vote_threshold(p, delta)?;
    let verdict = check_bit_with_threshold(oracle, last, p, final_threshold)?;
    Ok(TournamentReport {
        output: verdict.decision,
        queries_used: oracle.queries() - start,
        rounds,
        final_threshold: Some(final_threshold),
    })
}

/// Returns the index (from `indices`) of the estimated maximum, error
/// probability at most `delta`.
///
/// A match `(a, b)` keeps `b` when NoisyCompare says `a < b`, else `a`.
pub fn tournament_max<O, T>(
    oracle: &mut O,
    indices: &[usize],
    delta: T,
    p: T,
) -> Result<TournamentReport<usize, T>>
where
    O: ComparisonOracle + ?Sized,
    T: Real,
{
    let schedule = RoundSchedule::new(delta)?;
    check_inputs(indices, oracle.len(), p)?;
    let start = oracle.queries();
    let mut bracket = Bracket::new(indices)?;
    let mut rounds = Vec::new();
    for round in 1..=RoundSchedule::<T>::rounds(indices.len()) {
        let threshold = schedule.threshold(round, p)?;
        let pairs: Vec<_> = bracket.pairs().collect();
        let mut winners = Vec::with_capacity(pairs.len());
        for &(first, second) in &pairs {
            let less = noisy_compare_with_threshold(oracle, first, second, p, threshold)?;
            winners.push(if less.decision { second } else { first });
        }
        rounds.push(RoundRecord {
            round,
            ln_tolerance: schedule.ln_round_error(round),
            threshold,
            matches: pairs.len(),
        });
        bracket.advance(winners);
    }
    debug_assert_eq!(bracket.survivors().len(), 1);
    Ok(TournamentReport {
        output: bracket.survivors()[0],
        queries_used: oracle.queries() - start,
        rounds,
        final_threshold: None,
    })
}
