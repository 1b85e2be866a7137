//! Exact ground truth for small inputs.
//!
//! [`analyze_walk`] solves the stopping walk in closed form (cross-checked by
//! a dense absorbing-chain solve). [`enumerate_tournament`] walks every
//! decision branch of a tournament or two-phase algorithm, weighting each
//! primitive call by its exact walk law, and returns the exact error
//! probability and expected query count.
//!
//! The enumeration re-derives bracket logic, vote thresholds and sampling
//! weights on its own; it shares nothing with the Monte Carlo code paths
//! besides instance types.

mod enumerate;
mod walk;

pub use enumerate::{
    enumerate_tournament, ExactAlgorithm, ExactInstance, ExactOutput, ExactResult, STATE_CAP,
};
pub use walk::{analyze_walk, markov_walk_analysis, WalkAnalysis};
