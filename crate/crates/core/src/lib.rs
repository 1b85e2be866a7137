//! Noisy computation of OR and MAX.
//!
//! Every query answer passes through a binary symmetric channel with known
//! crossover probability `p`. The crate provides the two stopping
//! primitives ([`primitives::check_bit`], [`primitives::noisy_compare`]),
//! the knockout tournaments built on them, the two-phase algorithms
//! [`toplevel::noisy_or`] and [`toplevel::noisy_max`], closed-form query
//! bounds, an exact small-instance oracle, and a reproducible Monte Carlo
//! harness.
//!
//! All math is generic over [`Real`]; the aliases below pin `f64`, which is
//! what the harness and CLI use.
//!
//! Logarithms are natural logarithms throughout. Divergences and budgets are
//! reported in nats.

pub mod bounds;
pub mod error;
pub mod exact_oracle;
pub mod harness;
pub mod oracles;
pub mod primitives;
pub mod scalar;
pub mod tournaments;
pub mod toplevel;

pub use error::{Error, Result};
pub use scalar::Real;

pub type OrOracle64 = oracles::NoisyOracle<oracles::BitInstance, f64>;
pub type MaxOracle64 = oracles::NoisyOracle<oracles::ValueInstance<f64>, f64>;
pub type ValueInstance64 = oracles::ValueInstance<f64>;
pub type PosteriorState64 = primitives::PosteriorState<f64>;
pub type RoundSchedule64 = tournaments::RoundSchedule<f64>;
pub type BoundReport64 = bounds::BoundReport<f64>;
pub type WalkAnalysis64 = exact_oracle::WalkAnalysis<f64>;
