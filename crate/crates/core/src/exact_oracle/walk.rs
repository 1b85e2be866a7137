use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{in_open_half, Real};

/// Exact behaviour of the `±K` stopping walk when each answer is correct with
/// probability `1-p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkAnalysis<T> {
    pub threshold: u64,
    pub p: T,
    pub lambda: T,
    /// Probability of absorbing at the wrong boundary: `1 / (1 + λ^K)`.
    pub error_probability: T,
    /// Expected absorption time: `K (1 - 2 e) / (1 - 2p)`.
    pub expected_queries: T,
}

/// Gambler's-ruin closed form for the walk started at 0 with absorbing
/// barriers at `±K`.
pub fn analyze_walk<T: Real>(p: T, threshold: u64) -> Result<WalkAnalysis<T>> {
    if !in_open_half(p) {
        return Err(Error::contract(format!("p = {p} must lie in (0, 1/2)")));
    }
    if threshold == 0 {
        return Err(Error::contract("walk threshold must be >= 1"));
    }
    let one = T::one();
    let lambda = (one - p) / p;
    let k = T::from_count(threshold);
    // 1/(1+λ^K) written as e^{-x}/(1+e^{-x}) so large K cannot overflow.
    let neg = (-k * lambda.ln()).exp();
    let error_probability = neg / (one + neg);
    let expected_queries = k * (one - error_probability - error_probability) / (one - p - p);
    Ok(WalkAnalysis {
        threshold,
        p,
        lambda,
        error_probability,
        expected_queries,
    })
}

/// The same two quantities from a dense linear solve over the `2K-1`
/// transient states. Returns `(error_probability, expected_queries)`.
pub fn markov_walk_analysis(p: f64, threshold: u64) -> Result<(f64, f64)> {
    if !in_open_half(p) || threshold == 0 {
        return Err(Error::contract("markov walk needs p in (0, 1/2) and K >= 1"));
    }
    let k = threshold as usize;
    let states = 2 * k - 1;
    // state s holds net votes d = s - (K-1)
    let mut a = DMatrix::<f64>::identity(states, states);
    let mut low = DVector::<f64>::zeros(states);
    for s in 0..states {
        if s + 1 < states {
            a[(s, s + 1)] -= 1.0 - p;
        }
        if s > 0 {
            a[(s, s - 1)] -= p;
        } else {
            low[s] = p;
        }
    }
    let lu = a.lu();
    let ones = DVector::<f64>::from_element(states, 1.0);
    let time = lu
        .solve(&ones)
        .ok_or_else(|| Error::Invariant("singular walk system".into()))?;
    let absorb_low = lu
        .solve(&low)
        .ok_or_else(|| Error::Invariant("singular walk system".into()))?;
    Ok((absorb_low[k - 1], time[k - 1]))
}
