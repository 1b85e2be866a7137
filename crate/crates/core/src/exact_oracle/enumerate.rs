use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::oracles::{BitInstance, ValueInstance};

use super::walk::analyze_walk;

/// Maximum number of decision branches explored by one enumeration.
pub const STATE_CAP: u64 = 10_000_000;

const MAX_TOURNAMENT_N: usize = 8;
const MAX_FULL_N: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub enum ExactInstance {
    Bits(BitInstance),
    Values(ValueInstance<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactAlgorithm {
    TournamentOr,
    TournamentMax,
    NoisyOr,
    NoisyMax,
}

impl ExactAlgorithm {
    /// Worst-case error guarantee for base tolerance `delta`.
    pub fn error_bound(&self, delta: f64) -> f64 {
        match self {
            ExactAlgorithm::TournamentOr | ExactAlgorithm::TournamentMax => delta,
            ExactAlgorithm::NoisyOr => 2.0 * delta,
            ExactAlgorithm::NoisyMax => 3.0 * delta,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExactOutput {
    Bit(bool),
    Index(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactResult {
    pub error_probability: f64,
    pub expected_queries: f64,
    pub outcomes: Vec<(ExactOutput, f64)>,
    /// Decision branches explored.
    pub branches: u64,
}

#[derive(Clone, Debug, Default)]
struct Law<O: Ord> {
    outcomes: BTreeMap<O, f64>,
    expected_queries: f64,
}

impl<O: Ord + Copy> Law<O> {
    fn with_cost(expected_queries: f64) -> Self {
        Law {
            outcomes: BTreeMap::new(),
            expected_queries,
        }
    }

    fn point(o: O) -> Self {
        let mut outcomes = BTreeMap::new();
        outcomes.insert(o, 1.0);
        Self {
            outcomes,
            expected_queries: 0.0,
        }
    }

    fn absorb(&mut self, weight: f64, other: &Law<O>) {
        for (&o, &q) in &other.outcomes {
            *self.outcomes.entry(o).or_insert(0.0) += weight * q;
        }
        self.expected_queries += weight * other.expected_queries;
    }
}

struct Enumerator {
    p: f64,
    ln_lambda: f64,
    branches: u64,
    walk_cache: HashMap<u64, (f64, f64)>,
}

impl Enumerator {
    fn new(p: f64) -> Self {
        Self {
            p,
            ln_lambda: ((1.0 - p) / p).ln(),
            branches: 0,
            walk_cache: HashMap::new(),
        }
    }

    fn spend(&mut self, branches: u64) -> Result<()> {
        self.branches = self.branches.saturating_add(branches);
        if self.branches > STATE_CAP {
            return Err(Error::StateCapExceeded(format!(
                "more than {STATE_CAP} decision branches"
            )));
        }
        Ok(())
    }

    /// Smallest net-vote margin `d >= 1` whose posterior clears `1 - tol`,
    /// i.e. `d ln λ >= ln((1 - tol) / tol)`; `tol` is given as `ln tol`.
    fn margin(&self, ln_tol: f64) -> u64 {
        let tol = ln_tol.exp();
        let log_odds = if tol.is_normal() {
            ((1.0 - tol) / tol).ln()
        } else {
            -ln_tol
        };
        // a margin that lands on the boundary within rounding counts as reaching it
        let target = log_odds * (1.0 - 64.0 * f64::EPSILON);
        let mut d = (log_odds / self.ln_lambda).floor().max(1.0) as u64;
        while d > 1 && (d - 1) as f64 * self.ln_lambda >= target {
            d -= 1;
        }
        while (d as f64) * self.ln_lambda < target {
            d += 1;
        }
        d
    }

    /// `(error probability, expected queries)` of one primitive call.
    fn call(&mut self, margin: u64) -> Result<(f64, f64)> {
        if let Some(&law) = self.walk_cache.get(&margin) {
            return Ok(law);
        }
        let w = analyze_walk(self.p, margin)?;
        let law = (w.error_probability, w.expected_queries);
        self.walk_cache.insert(margin, law);
        Ok(law)
    }

    fn round_ln_tol(ln_delta: f64, round: usize) -> f64 {
        (2 * (2 * round - 1)) as f64 * ln_delta
    }

    /// Outcome law of the max tournament from `round` on.
    fn max_bracket(
        &mut self,
        values: &ValueInstance<f64>,
        survivors: &[usize],
        round: usize,
        ln_delta: f64,
    ) -> Result<Law<usize>> {
        if survivors.len() == 1 {
            return Ok(Law::point(survivors[0]));
        }
        let margin = self.margin(Self::round_ln_tol(ln_delta, round));
        let (err, calls) = self.call(margin)?;
        let matches = survivors.len() / 2;
        let bye = (survivors.len() % 2 == 1).then(|| survivors[survivors.len() - 1]);
        let combos = 1u64 << matches;
        self.spend(combos)?;

        let mut law = Law::with_cost(matches as f64 * calls);
        for mask in 0..combos {
            let mut weight = 1.0;
            let mut next = Vec::with_capacity(matches + 1);
            for m in 0..matches {
                let (a, b) = (survivors[2 * m], survivors[2 * m + 1]);
                let says_less = mask >> m & 1 == 1;
                let truly_less = values.less(a, b);
                weight *= if says_less == truly_less { 1.0 - err } else { err };
                next.push(if says_less { b } else { a });
            }
            next.extend(bye);
            if weight == 0.0 {
                continue;
            }
            let sub = self.max_bracket(values, &next, round + 1, ln_delta)?;
            law.absorb(weight, &sub);
        }
        Ok(law)
    }

    /// Outcome law of the OR tournament from `round` on, including the
    /// closing check at the base tolerance.
    fn or_bracket(
        &mut self,
        bits: &BitInstance,
        survivors: &[usize],
        round: usize,
        ln_delta: f64,
    ) -> Result<Law<bool>> {
        if survivors.len() == 1 {
            let margin = self.margin(ln_delta);
            let (err, calls) = self.call(margin)?;
            self.spend(2)?;
            let truth = bits.bits()[survivors[0]];
            let mut law = Law::default();
            law.outcomes.insert(truth, 1.0 - err);
            law.outcomes.insert(!truth, err);
            law.expected_queries = calls;
            return Ok(law);
        }
        let margin = self.margin(Self::round_ln_tol(ln_delta, round));
        let (err, calls) = self.call(margin)?;
        let matches = survivors.len() / 2;
        let bye = (survivors.len() % 2 == 1).then(|| survivors[survivors.len() - 1]);
        let combos = 1u64 << matches;
        self.spend(combos)?;

        let mut law = Law::with_cost(matches as f64 * calls);
        for mask in 0..combos {
            let mut weight = 1.0;
            let mut next = Vec::with_capacity(matches + 1);
            for m in 0..matches {
                let (a, b) = (survivors[2 * m], survivors[2 * m + 1]);
                let says_one = mask >> m & 1 == 1;
                weight *= if says_one == bits.bits()[a] { 1.0 - err } else { err };
                next.push(if says_one { a } else { b });
            }
            next.extend(bye);
            if weight == 0.0 {
                continue;
            }
            let sub = self.or_bracket(bits, &next, round + 1, ln_delta)?;
            law.absorb(weight, &sub);
        }
        Ok(law)
    }

    fn noisy_or(&mut self, bits: &BitInstance, ln_delta: f64) -> Result<Law<bool>> {
        let n = bits.len();
        let (err, calls) = self.call(self.margin(ln_delta))?;
        let delta = ln_delta.exp();
        let cutoff = (n as f64).ln().max(n as f64 * delta * -ln_delta);
        let subsets = 1u64 << n;
        self.spend(subsets)?;

        let mut law = Law::default();
        for mask in 0..subsets {
            let mut weight = 1.0;
            let mut positives = Vec::new();
            for i in 0..n {
                let says_one = mask >> i & 1 == 1;
                weight *= if says_one == bits.bits()[i] { 1.0 - err } else { err };
                if says_one {
                    positives.push(i);
                }
            }
            if weight == 0.0 {
                continue;
            }
            let sub = if positives.is_empty() {
                Law::point(false)
            } else if positives.len() as f64 >= cutoff {
                Law::point(true)
            } else {
                self.or_bracket(bits, &positives, 1, ln_delta)?
            };
            law.absorb(weight, &sub);
        }
        law.expected_queries += n as f64 * calls;
        Ok(law)
    }

    fn noisy_max(&mut self, values: &ValueInstance<f64>, ln_delta: f64) -> Result<Law<usize>> {
        let n = values.len();
        let ln_n = (n as f64).ln();
        let q = if ln_n <= 1.0 { 1.0 } else { 1.0 / ln_n };
        let nonempty = 1.0 - (1.0 - q).powi(n as i32);
        let (err, calls) = self.call(self.margin(ln_delta))?;
        let subsets = 1u64 << n;
        self.spend(subsets)?;

        let mut law = Law::default();
        for mask in 1..subsets {
            let sample: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let rest: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
            let weight = q.powi(sample.len() as i32) * (1.0 - q).powi(rest.len() as i32) / nonempty;
            if weight == 0.0 {
                continue;
            }
            let first = self.max_bracket(values, &sample, 1, ln_delta)?;
            let mut branch = Law::with_cost(first.expected_queries);
            for (&winner, &w_winner) in &first.outcomes {
                let mut after = Law::with_cost(rest.len() as f64 * calls);
                let combos = 1u64 << rest.len();
                self.spend(combos)?;
                for pick in 0..combos {
                    let mut w = 1.0;
                    let mut finalists = vec![winner];
                    for (k, &u) in rest.iter().enumerate() {
                        let says_less = pick >> k & 1 == 1;
                        w *= if says_less == values.less(winner, u) { 1.0 - err } else { err };
                        if says_less {
                            finalists.push(u);
                        }
                    }
                    if w == 0.0 {
                        continue;
                    }
                    let last = self.max_bracket(values, &finalists, 1, ln_delta)?;
                    after.absorb(w, &last);
                }
                branch.absorb(w_winner, &after);
            }
            law.absorb(weight, &branch);
        }
        Ok(law)
    }
}

/// Exact error probability and expected query count of `algorithm` on
/// `instance`, for tournaments with `n <= 8` and full algorithms with `n <= 4`.
pub fn enumerate_tournament(
    instance: &ExactInstance,
    algorithm: ExactAlgorithm,
    delta: f64,
    p: f64,
) -> Result<ExactResult> {
    if !(p > 0.0 && p < 0.5) || !(delta > 0.0 && delta < 0.5) {
        return Err(Error::contract("enumeration needs p and delta in (0, 1/2)"));
    }
    let ln_delta = delta.ln();
    let mut e = Enumerator::new(p);
    let cap = match algorithm {
        ExactAlgorithm::TournamentOr | ExactAlgorithm::TournamentMax => MAX_TOURNAMENT_N,
        ExactAlgorithm::NoisyOr | ExactAlgorithm::NoisyMax => MAX_FULL_N,
    };
    let n = match instance {
        ExactInstance::Bits(b) => b.len(),
        ExactInstance::Values(v) => v.len(),
    };
    if n > cap {
        return Err(Error::StateCapExceeded(format!(
            "{algorithm:?} enumeration supports n <= {cap}, got {n}"
        )));
    }

    let (outcomes, expected_queries, truth) = match (algorithm, instance) {
        (ExactAlgorithm::TournamentOr, ExactInstance::Bits(b)) => {
            let all: Vec<usize> = (0..n).collect();
            let law = e.or_bracket(b, &all, 1, ln_delta)?;
            (bits_out(&law), law.expected_queries, ExactOutput::Bit(b.truth()))
        }
        (ExactAlgorithm::NoisyOr, ExactInstance::Bits(b)) => {
            let law = e.noisy_or(b, ln_delta)?;
            (bits_out(&law), law.expected_queries, ExactOutput::Bit(b.truth()))
        }
        (ExactAlgorithm::TournamentMax, ExactInstance::Values(v)) => {
            let all: Vec<usize> = (0..n).collect();
            let law = e.max_bracket(v, &all, 1, ln_delta)?;
            (index_out(&law), law.expected_queries, ExactOutput::Index(v.truth()))
        }
        (ExactAlgorithm::NoisyMax, ExactInstance::Values(v)) => {
            let law = e.noisy_max(v, ln_delta)?;
            (index_out(&law), law.expected_queries, ExactOutput::Index(v.truth()))
        }
        (alg, _) => {
            return Err(Error::contract(format!(
                "{alg:?} does not run on this instance type"
            )))
        }
    };
    let error_probability = outcomes
        .iter()
        .filter(|(o, _)| *o != truth)
        .map(|(_, q)| q)
        .sum();
    Ok(ExactResult {
        error_probability,
        expected_queries,
        outcomes,
        branches: e.branches,
    })
}

fn bits_out(law: &Law<bool>) -> Vec<(ExactOutput, f64)> {
    law.outcomes.iter().map(|(&b, &q)| (ExactOutput::Bit(b), q)).collect()
}

fn index_out(law: &Law<usize>) -> Vec<(ExactOutput, f64)> {
    law.outcomes.iter().map(|(&i, &q)| (ExactOutput::Index(i), q)).collect()
}
