//! Bayesian stopping primitives: CheckBit for a single noisy bit and
//! NoisyCompare for a single noisy pair.
//!
//! Both repeat one query, updating the posterior that the answer is "1"
//! (resp. "less than") from a prior of 1/2, and stop once the posterior
//! leaves `(δ, 1-δ)`. After `d` net votes for "1" the posterior is
//! `λ^d / (1 + λ^d)` with `λ = (1-p)/p`, so the stopping rule is exactly
//! `|d| >= K` with `K = ⌈log((1-δ)/δ) / log λ⌉`. The state is kept as the
//! integer `d`, which cannot underflow however small `δ` gets.

use num_traits::Num;

use crate::error::{Error, Result};
use crate::oracles::{BitOracle, ComparisonOracle};
use crate::scalar::{in_open_half, Real};

/// Net-vote margin at which the walk commits, for tolerance `delta`.
pub fn vote_threshold<T: Real>(p: T, delta: T) -> Result<u64> {
    check_p(p)?;
    if !in_open_half(delta) {
        return Err(Error::contract(format!("delta = {delta} must lie in (0, 1/2)")));
    }
    let one = T::one();
    let ratio = ((one - delta) / delta).ln() / ((one - p) / p).ln();
    ceil_threshold(ratio)
}

/// Same as [`vote_threshold`], with the tolerance given as `ln δ`.
///
/// Used when `δ` itself is below the smallest normal float.
pub fn vote_threshold_from_ln<T: Real>(p: T, ln_delta: T) -> Result<u64> {
    check_p(p)?;
    if !(ln_delta < T::lit(0.5).ln()) || ln_delta.is_nan() {
        return Err(Error::contract(format!("ln delta = {ln_delta} must be below ln(1/2)")));
    }
    let one = T::one();
    // ln((1-δ)/δ) = ln(1-δ) - ln δ
    let log_odds = (-ln_delta.exp()).ln_1p() - ln_delta;
    let ratio = log_odds / ((one - p) / p).ln();
    ceil_threshold(ratio)
}

/// `⌈ratio⌉`, except that a ratio within rounding noise above an integer is
/// taken as that integer: an exact tie means the posterior lands on the
/// boundary `1-δ`, which already stops the walk.
fn ceil_threshold<T: Real>(ratio: T) -> Result<u64> {
    let below = ratio.floor();
    let slack = T::epsilon() * T::lit(64.0) * ratio.abs();
    let k = if ratio - below <= slack { below } else { ratio.ceil() };
    if !k.is_finite() {
        return Err(Error::contract("vote threshold is not finite"));
    }
    let k = k
        .to_u64()
        .ok_or_else(|| Error::contract(format!("vote threshold {k} does not fit in u64")))?;
    Ok(k.max(1))
}

fn check_p<T: Real>(p: T) -> Result<()> {
    if in_open_half(p) {
        Ok(())
    } else {
        Err(Error::contract(format!("p = {p} must lie in (0, 1/2)")))
    }
}

/// One step of the posterior recursion on `α = P(answer is 1 | observations)`.
///
/// Generic over any field so tests can run it in exact rational arithmetic.
pub fn posterior_update<T: Num + Clone>(alpha: T, p: T, observed_one: bool) -> T {
    let one = T::one();
    let q = one.clone() - p.clone();
    let not_alpha = one - alpha.clone();
    if observed_one {
        let num = q * alpha;
        num.clone() / (num + p * not_alpha)
    } else {
        let num = p * alpha;
        num.clone() / (num + q * not_alpha)
    }
}

/// Posterior of the stopping primitives, stored as a net vote count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PosteriorState<T> {
    net_votes: i64,
    threshold: u64,
    lambda: T,
}

impl<T: Real> PosteriorState<T> {
    pub fn new(p: T, threshold: u64) -> Result<Self> {
        check_p(p)?;
        if threshold == 0 {
            return Err(Error::contract("vote threshold must be >= 1"));
        }
        if threshold > i64::MAX as u64 {
            return Err(Error::contract("vote threshold too large"));
        }
        Ok(Self {
            net_votes: 0,
            threshold,
            lambda: (T::one() - p) / p,
        })
    }

    pub fn for_tolerance(p: T, delta: T) -> Result<Self> {
        Self::new(p, vote_threshold(p, delta)?)
    }

    /// Records one answer. Has no effect once the walk has stopped.
    pub fn observe(&mut self, observed_one: bool) {
        if self.is_stopped() {
            return;
        }
        self.net_votes += if observed_one { 1 } else { -1 };
    }

    pub fn is_stopped(&self) -> bool {
        self.net_votes.unsigned_abs() >= self.threshold
    }

    /// `Some(true)` once the posterior reached `1-δ`, `Some(false)` once it
    /// reached `δ`, `None` while still running.
    pub fn decision(&self) -> Option<bool> {
        if self.is_stopped() {
            Some(self.net_votes > 0)
        } else {
            None
        }
    }

    pub fn net_votes(&self) -> i64 {
        self.net_votes
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// The posterior `λ^d / (1 + λ^d)`.
    pub fn alpha(&self) -> T {
        let one = T::one();
        let d = self.net_votes;
        let mag = if let Ok(e) = i32::try_from(d.unsigned_abs()) {
            self.lambda.powi(e)
        } else {
            (T::from_i64(d.abs()).expect("vote count") * self.lambda.ln()).exp()
        };
        if d >= 0 {
            one / (one + one / mag)
        } else {
            one / (one + mag)
        }
    }
}

/// Outcome of one stopping primitive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StopReport<D> {
    pub decision: D,
    pub queries_used: u64,
}

/// Estimates bit `i` with error probability at most `delta`.
pub fn check_bit<O, T>(oracle: &mut O, i: usize, delta: T, p: T) -> Result<StopReport<bool>>
where
    O: BitOracle + ?Sized,
    T: Real,
{
    let state = PosteriorState::for_tolerance(p, delta)?;
    run_walk(state, || oracle.read_bit(i))
}

/// [`check_bit`] with a precomputed vote threshold.
pub fn check_bit_with_threshold<O, T>(
    oracle: &mut O,
    i: usize,
    p: T,
    threshold: u64,
) -> Result<StopReport<bool>>
where
    O: BitOracle + ?Sized,
    T: Real,
{
    let state = PosteriorState::new(p, threshold)?;
    run_walk(state, || oracle.read_bit(i))
}

/// Decides whether `values[i] < values[j]` with error probability at most
/// `delta`.
pub fn noisy_compare<O, T>(
    oracle: &mut O,
    i: usize,
    j: usize,
    delta: T,
    p: T,
) -> Result<StopReport<bool>>
where
    O: ComparisonOracle + ?Sized,
    T: Real,
{
    let state = PosteriorState::for_tolerance(p, delta)?;
    compare_walk(oracle, i, j, state)
}

/// [`noisy_compare`] with a precomputed vote threshold.
pub fn noisy_compare_with_threshold<O, T>(
    oracle: &mut O,
    i: usize,
    j: usize,
    p: T,
    threshold: u64,
) -> Result<StopReport<bool>>
where
    O: ComparisonOracle + ?Sized,
    T: Real,
{
    let state = PosteriorState::new(p, threshold)?;
    compare_walk(oracle, i, j, state)
}

fn compare_walk<O, T>(
    oracle: &mut O,
    i: usize,
    j: usize,
    state: PosteriorState<T>,
) -> Result<StopReport<bool>>
where
    O: ComparisonOracle + ?Sized,
    T: Real,
{
    if i == j {
        return Err(Error::contract(format!("cannot compare element {i} with itself")));
    }
    run_walk(state, || oracle.compare(i, j))
}

fn run_walk<T: Real>(
    mut state: PosteriorState<T>,
    mut ask: impl FnMut() -> Result<bool>,
) -> Result<StopReport<bool>> {
    let mut queries_used = 0u64;
    loop {
        if let Some(decision) = state.decision() {
            return Ok(StopReport {
                decision,
                queries_used,
            });
        }
        state.observe(ask()?);
        queries_used += 1;
    }
}
