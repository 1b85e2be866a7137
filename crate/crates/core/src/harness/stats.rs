use serde::Serialize;

use crate::bounds::{checkbit_budget, lecam_min_queries, upper_budget};
use crate::error::Result;

use super::config::ExperimentConfig;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrialStats {
    pub trial_index: u64,
    pub correct: bool,
    pub queries: u64,
    pub phase1_queries: u64,
    pub subroutine_queries: u64,
}

/// One output row. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateStats {
    pub algorithm: String,
    pub instance: String,
    pub n: usize,
    pub p: f64,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    pub errors: u64,
    pub error_rate: f64,
    pub error_ci_lo: f64,
    pub error_ci_hi: f64,
    pub mean_queries: f64,
    pub queries_ci_lo: f64,
    pub queries_ci_hi: f64,
    pub max_queries: u64,
    pub phase1_mean_queries: f64,
    pub subroutine_mean_queries: f64,
    pub theory_upper_budget: f64,
    pub theory_lecam_m_at_delta: f64,
    pub ratio_mean_over_upper: f64,
}

/// Columns reported only in JSON output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtraStats {
    pub queries_std: f64,
    /// `n · K / (1-2p)`: the first-pass cost bound of n stopping calls.
    pub theory_checkbit_total: f64,
    /// Lower-bound query count at the observed error rate; absent when the
    /// observed rate is 0 or at least 1/4.
    pub theory_lecam_m_at_observed: Option<f64>,
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the endpoints are exactly 0 and 1 at the extremes; rounding would
    // otherwise leave ~1e-18 residue
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Aggregates in trial order, so the result does not depend on scheduling.
pub fn aggregate(config: &ExperimentConfig, trials: &[TrialStats]) -> Result<(AggregateStats, ExtraStats)> {
    let count = trials.len() as u64;
    let nf = count as f64;
    let errors = trials.iter().filter(|t| !t.correct).count() as u64;
    let sum: u64 = trials.iter().map(|t| t.queries).sum();
    let sum_phase1: u64 = trials.iter().map(|t| t.phase1_queries).sum();
    let sum_sub: u64 = trials.iter().map(|t| t.subroutine_queries).sum();
    let mean = sum as f64 / nf;
    let var = if count > 1 {
        trials
            .iter()
            .map(|t| (t.queries as f64 - mean).powi(2))
            .sum::<f64>()
            / (nf - 1.0)
    } else {
        0.0
    };
    let std = var.sqrt();
    let half = Z_95 * std / nf.sqrt();
    let (lo, hi) = wilson_interval(errors, count, Z_95);
    let error_rate = errors as f64 / nf;
    let upper = upper_budget(config.n, config.delta, config.p)?;
    let lecam_at_delta = lecam_min_queries(config.n, config.delta, config.p)?;
    let lecam_observed = (error_rate > 0.0 && error_rate < 0.25)
        .then(|| lecam_min_queries(config.n, error_rate, config.p))
        .transpose()?;

    let row = AggregateStats {
        algorithm: config.algorithm.name().to_string(),
        instance: config.instance.to_string(),
        n: config.n,
        p: config.p,
        delta: config.delta,
        trials: count,
        seed: config.master_seed,
        errors,
        error_rate,
        error_ci_lo: lo,
        error_ci_hi: hi,
        mean_queries: mean,
        queries_ci_lo: mean - half,
        queries_ci_hi: mean + half,
        max_queries: trials.iter().map(|t| t.queries).max().unwrap_or(0),
        phase1_mean_queries: sum_phase1 as f64 / nf,
        subroutine_mean_queries: sum_sub as f64 / nf,
        theory_upper_budget: upper,
        theory_lecam_m_at_delta: lecam_at_delta,
        ratio_mean_over_upper: mean / upper,
    };
    let extra = ExtraStats {
        queries_std: std,
        theory_checkbit_total: config.n as f64 * checkbit_budget(config.delta, config.p)?,
        theory_lecam_m_at_observed: lecam_observed,
    };
    Ok((row, extra))
}
