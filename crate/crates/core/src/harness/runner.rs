use log::debug;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::oracles::{BitInstance, NoisyOracle, TrialKey, ValueInstance};
use crate::primitives::{check_bit, noisy_compare};
use crate::toplevel::{noisy_max_keyed, noisy_or};
use crate::tournaments::{tournament_max, tournament_or};

use super::config::{Algorithm, BuiltInstance, ExperimentConfig};
use super::grid::SweepGrid;
use super::stats::{aggregate, AggregateStats, ExtraStats, TrialStats};

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub aggregate: AggregateStats,
    pub extra: ExtraStats,
    pub trials: Vec<TrialStats>,
}

fn bit_oracle(inst: &BitInstance, p: f64, key: TrialKey) -> Result<NoisyOracle<BitInstance, f64>> {
    NoisyOracle::seeded(inst.clone(), p, key)
}

fn value_oracle(
    inst: &ValueInstance<f64>,
    p: f64,
    key: TrialKey,
) -> Result<NoisyOracle<ValueInstance<f64>, f64>> {
    NoisyOracle::seeded(inst.clone(), p, key)
}

fn conserved(ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant("query ledger not conserved".into()))
    }
}

fn phase_sum(stats: TrialStats) -> Result<TrialStats> {
    if stats.phase1_queries + stats.subroutine_queries != stats.queries {
        return Err(Error::Invariant(format!(
            "trial {}: phase breakdown {} + {} != {} queries",
            stats.trial_index, stats.phase1_queries, stats.subroutine_queries, stats.queries
        )));
    }
    Ok(stats)
}

/// Runs trial `trial_index` of `config` against the prepared instance.
///
/// Stopping primitives and tournaments report all their queries as phase 1.
pub fn run_trial(
    config: &ExperimentConfig,
    instance: &BuiltInstance,
    trial_index: u64,
) -> Result<TrialStats> {
    let key = TrialKey::new(config.master_seed, trial_index);
    let (p, delta) = (config.p, config.delta);
    let all = || (0..config.n).collect::<Vec<_>>();
    let (correct, phase1, sub, total) = match (config.algorithm, instance) {
        (Algorithm::CheckBit, BuiltInstance::Bits(b)) => {
            let mut o = bit_oracle(b, p, key)?;
            let r = check_bit(&mut o, config.target, delta, p)?;
            conserved(o.ledger().is_conserved())?;
            let truth = b.bits()[config.target];
            (r.decision == truth, r.queries_used, 0, o.ledger().total())
        }
        (Algorithm::TournamentOr, BuiltInstance::Bits(b)) => {
            let mut o = bit_oracle(b, p, key)?;
            let r = tournament_or(&mut o, &all(), delta, p)?;
            conserved(o.ledger().is_conserved())?;
            (r.output == b.truth(), r.queries_used, 0, o.ledger().total())
        }
        (Algorithm::NoisyOr, BuiltInstance::Bits(b)) => {
            let mut o = bit_oracle(b, p, key)?;
            let r = noisy_or(&mut o, delta, p)?;
            conserved(o.ledger().is_conserved())?;
            (r.value == b.truth(), r.phase1_queries, r.subroutine_queries, o.ledger().total())
        }
        (Algorithm::NoisyCompare, BuiltInstance::Values(v)) => {
            let mut o = value_oracle(v, p, key)?;
            let (i, j) = config.pair;
            let r = noisy_compare(&mut o, i, j, delta, p)?;
            conserved(o.ledger().is_conserved())?;
            (r.decision == v.less(i, j), r.queries_used, 0, o.ledger().total())
        }
        (Algorithm::TournamentMax, BuiltInstance::Values(v)) => {
            let mut o = value_oracle(v, p, key)?;
            let r = tournament_max(&mut o, &all(), delta, p)?;
            conserved(o.ledger().is_conserved())?;
            (r.output == v.truth(), r.queries_used, 0, o.ledger().total())
        }
        (Algorithm::NoisyMax, BuiltInstance::Values(v)) => {
            let mut o = value_oracle(v, p, key)?;
            let r = noisy_max_keyed(&mut o, delta, p, key)?;
            conserved(o.ledger().is_conserved())?;
            (r.index == v.truth(), r.phase1_queries, r.subroutine_queries, o.ledger().total())
        }
        (alg, _) => {
            return Err(Error::Config(format!("{alg} cannot run on this instance type")));
        }
    };
    phase_sum(TrialStats {
        trial_index,
        correct,
        queries: total,
        phase1_queries: phase1,
        subroutine_queries: sub,
    })
}

/// Runs every trial of `config` and aggregates. Trials run in parallel;
/// the result is identical for any thread count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let instance = config.build_instance()?;
    debug!(
        "running {} on {} (n={}, p={}, delta={}, trials={}, seed={})",
        config.algorithm,
        config.instance,
        config.n,
        config.p,
        config.delta,
        config.trials,
        config.master_seed
    );
    let work = || {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, &instance, t))
            .collect::<Result<Vec<_>>>()
    };
    let trials = match config.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let (aggregate, extra) = aggregate(config, &trials)?;
    Ok(ExperimentResult {
        aggregate,
        extra,
        trials,
    })
}

/// One row per grid point, `n`-major, then `p`, then `delta`.
pub fn run_sweep(base: &ExperimentConfig, grid: &SweepGrid) -> Result<Vec<ExperimentResult>> {
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &n in &grid.n {
        for &p in &grid.p {
            for &delta in &grid.delta {
                let mut config = base.clone();
                config.n = n;
                config.p = p;
                config.delta = delta;
                rows.push(run_experiment(&config)?);
            }
        }
    }
    Ok(rows)
}
