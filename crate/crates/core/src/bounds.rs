//! Closed-form query bounds.
//!
//! All logarithms are natural, so divergences and budgets are in nats. The
//! one exception is the channel-capacity factor `1 - H(p)` in
//! [`tournament_budget`], which uses the entropy in bits so that it stays in
//! `(0, 1)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::primitives::vote_threshold;
use crate::scalar::{in_open_half, Real};

/// Calibrated over r ∈ {2, ..., 1024}, p ∈ {0.1, 0.25, 0.4},
/// δ ∈ {0.05, 0.01}: the largest ratio of exact expected tournament queries
/// to the bracketed expression is about 3.74 (at r = 2), rounded up.
pub const DEFAULT_TOURNAMENT_CONSTANT: f64 = 4.0;

fn check_half<T: Real>(name: &str, x: T) -> Result<()> {
    if in_open_half(x) {
        Ok(())
    } else {
        Err(Error::contract(format!("{name} = {x} must lie in (0, 1/2)")))
    }
}

/// `D(Bern(p) ‖ Bern(1-p)) = (1-2p) log((1-p)/p)`.
pub fn kl_pq<T: Real>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::contract(format!(
            "p = {p} must lie in (0, 1) for a finite divergence"
        )));
    }
    let one = T::one();
    Ok((one - p - p) * ((one - p) / p).ln())
}

/// Binary entropy in nats, with `H(0) = H(1) = 0`.
pub fn binary_entropy<T: Real>(p: T) -> T {
    let term = |x: T| if x > T::zero() { -x * x.ln() } else { T::zero() };
    term(p) + term(T::one() - p)
}

pub fn binary_entropy_bits<T: Real>(p: T) -> T {
    binary_entropy(p) / T::lit(2.0).ln()
}

/// Error floor `¼ exp(-m D / n)` for any algorithm whose worst-case expected
/// query count is `m`.
pub fn lecam_floor<T: Real>(n: usize, m: T, p: T) -> Result<T> {
    check_half("p", p)?;
    if n == 0 || m < T::zero() {
        return Err(Error::contract("lecam_floor needs n >= 1 and m >= 0"));
    }
    let nf = T::from_usize(n).expect("n representable");
    Ok(T::lit(0.25) * (-m * kl_pq(p)? / nf).exp())
}

/// Smallest `m` whose error floor is at most `target`: `n log(1/(4ε)) / D`.
/// Zero when `target >= 1/4`.
pub fn lecam_min_queries<T: Real>(n: usize, target: T, p: T) -> Result<T> {
    check_half("p", p)?;
    if !(target > T::zero()) {
        return Err(Error::contract("target error must be positive"));
    }
    let nf = T::from_usize(n).expect("n representable");
    let m = nf * (T::one() / (T::lit(4.0) * target)).ln() / kl_pq(p)?;
    Ok(m.max(T::zero()))
}

/// Leading term `n log(1/δ) / D` of the optimal expected query count.
/// The `(1 + o(1))` factor is not included.
pub fn upper_budget<T: Real>(n: usize, delta: T, p: T) -> Result<T> {
    check_half("p", p)?;
    if !(delta > T::zero() && delta <= T::one()) {
        return Err(Error::contract(format!("delta = {delta} must lie in (0, 1]")));
    }
    let nf = T::from_usize(n).expect("n representable");
    Ok(nf * (T::one() / delta).ln() / kl_pq(p)?)
}

/// Expected-query bound of one CheckBit / NoisyCompare call: `K / (1-2p)`.
pub fn checkbit_budget<T: Real>(delta: T, p: T) -> Result<T> {
    let k = vote_threshold(p, delta)?;
    Ok(T::from_count(k) / (T::one() - p - p))
}

/// `C (r / (1 - H(p)) + r log(1/δ) / D)`, the tournament query bound.
pub fn tournament_budget<T: Real>(r: usize, delta: T, p: T, constant: T) -> Result<T> {
    check_half("p", p)?;
    check_half("delta", delta)?;
    if r == 0 || !(constant > T::zero()) {
        return Err(Error::contract("tournament_budget needs r >= 1 and C > 0"));
    }
    let rf = T::from_usize(r).expect("r representable");
    let capacity = T::one() - binary_entropy_bits(p);
    Ok(constant * (rf / capacity + rf * (T::one() / delta).ln() / kl_pq(p)?))
}

/// Where `log(1/δ) / log(1/p)` puts a parameter pair when `p` varies with `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RegimeClass {
    /// Ratio ≥ 10: the divergence term dominates.
    KlDominated,
    /// Ratio ≤ 0.1: about `n` queries, one per element, dominate.
    LinearDominated,
    /// Constant gap: bounds tight only up to a constant.
    ConstantGap,
}

impl RegimeClass {
    pub fn classify<T: Real>(ratio: T) -> Self {
        if ratio >= T::lit(10.0) {
            RegimeClass::KlDominated
        } else if ratio <= T::lit(0.1) {
            RegimeClass::LinearDominated
        } else {
            RegimeClass::ConstantGap
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RegimeClass::KlDominated => "omega(1)-like: KL term dominates, bounds tight to 1+o(1)",
            RegimeClass::LinearDominated => "o(1)-like: n term dominates, about n queries",
            RegimeClass::ConstantGap => "Theta(1): constant gap, bounds tight up to constant",
        }
    }
}

/// Every bound evaluated at one `(n, p, δ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport<T> {
    pub n: usize,
    pub p: T,
    pub delta: T,
    pub d_kl: T,
    pub entropy_nats: T,
    pub entropy_bits: T,
    pub vote_threshold: u64,
    pub checkbit_budget: T,
    pub upper_budget: T,
    /// Minimum worst-case expected queries for error `δ`.
    pub lower_budget: T,
    pub tournament_budget: T,
    pub tournament_constant: T,
    pub regime_ratio: T,
    pub regime: RegimeClass,
}

impl<T: Real> BoundReport<T> {
    pub fn new(n: usize, delta: T, p: T) -> Result<Self> {
        check_half("p", p)?;
        check_half("delta", delta)?;
        if n == 0 {
            return Err(Error::contract("n must be >= 1"));
        }
        let constant = T::lit(DEFAULT_TOURNAMENT_CONSTANT);
        let regime_ratio = (T::one() / delta).ln() / (T::one() / p).ln();
        Ok(Self {
            n,
            p,
            delta,
            d_kl: kl_pq(p)?,
            entropy_nats: binary_entropy(p),
            entropy_bits: binary_entropy_bits(p),
            vote_threshold: vote_threshold(p, delta)?,
            checkbit_budget: checkbit_budget(delta, p)?,
            upper_budget: upper_budget(n, delta, p)?,
            lower_budget: lecam_min_queries(n, delta, p)?,
            tournament_budget: tournament_budget(n, delta, p, constant)?,
            tournament_constant: constant,
            regime_ratio,
            regime: RegimeClass::classify(regime_ratio),
        })
    }

    /// `lecam_floor(n, m, p)` for this report's `n` and `p`.
    pub fn lecam_floor(&self, m: T) -> Result<T> {
        lecam_floor(self.n, m, self.p)
    }

    /// Human-readable rendering, one `key = value` per line.
    pub fn render(&self) -> String {
        let lines = [
            "# logarithms are natural; divergences and budgets in nats".to_string(),
            "# 1-H(p) in the tournament budget uses H in bits".to_string(),
            format!("n = {}", self.n),
            format!("p = {}", self.p),
            format!("delta = {}", self.delta),
            format!("d_kl = {:.6}", self.d_kl.as_f64()),
            format!("entropy_nats = {:.6}", self.entropy_nats.as_f64()),
            format!("entropy_bits = {:.6}", self.entropy_bits.as_f64()),
            format!("vote_threshold = {}", self.vote_threshold),
            format!("checkbit_budget = {:.6}", self.checkbit_budget.as_f64()),
            format!("upper_budget = {:.2}", self.upper_budget.as_f64()),
            format!("lecam_m_at_delta = {:.2}", self.lower_budget.as_f64()),
            format!("lecam_floor_at_m0 = {}", 0.25),
            format!(
                "tournament_budget = {:.2} (C = {})",
                self.tournament_budget.as_f64(),
                self.tournament_constant
            ),
            format!("regime_ratio = {:.6}", self.regime_ratio.as_f64()),
            format!("regime = {}", self.regime.label()),
        ];
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}
