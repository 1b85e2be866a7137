//! Cross-checks between the exact oracle and the Monte Carlo harness.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_oracle::{analyze_walk, enumerate_tournament, markov_walk_analysis, ExactResult};

use super::config::{Algorithm, ExperimentConfig, InstanceSpec};
use super::runner::{run_experiment, ExperimentResult};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckLine {
    pub fn render(&self) -> String {
        format!(
            "[{}] {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

pub const VERIFY_PS: [f64; 3] = [0.1, 0.25, 0.4];
pub const VERIFY_DELTAS: [f64; 2] = [0.05, 0.01];

/// Every configuration small enough for exact enumeration that the
/// cross-checks cover.
pub fn enumerable_configurations() -> Vec<ExperimentConfig> {
    let mut out = Vec::new();
    let mut push = |alg: Algorithm, inst: InstanceSpec, n: usize| {
        for p in VERIFY_PS {
            for delta in VERIFY_DELTAS {
                out.push(ExperimentConfig::new(alg, inst.clone(), n, p, delta));
            }
        }
    };
    for n in 2..=4 {
        push(Algorithm::TournamentOr, InstanceSpec::AllZero, n);
        push(Algorithm::TournamentOr, InstanceSpec::SingleOne(1), n);
        push(Algorithm::TournamentOr, InstanceSpec::SingleOne(n), n);
        push(Algorithm::TournamentMax, InstanceSpec::Sorted, n);
        push(Algorithm::TournamentMax, InstanceSpec::Relocated(1), n);
    }
    for n in 2..=3 {
        push(Algorithm::NoisyOr, InstanceSpec::AllZero, n);
        push(Algorithm::NoisyOr, InstanceSpec::SingleOne(1), n);
        push(Algorithm::NoisyMax, InstanceSpec::Sorted, n);
        push(Algorithm::NoisyMax, InstanceSpec::Relocated(1), n);
    }
    out
}

pub fn exact_for(config: &ExperimentConfig) -> Result<ExactResult> {
    let alg = config
        .algorithm
        .exact()
        .ok_or_else(|| Error::Config(format!("{} has no enumerable form", config.algorithm)))?;
    let inst = config.build_instance()?.to_exact();
    enumerate_tournament(&inst, alg, config.delta, config.p)
}

/// Outcome of comparing one Monte Carlo run against exact values.
#[derive(Clone, Debug, PartialEq)]
pub struct Agreement {
    pub exact_error: f64,
    pub exact_queries: f64,
    pub empirical_error: f64,
    pub empirical_queries: f64,
    /// `|empirical - exact|` in binomial standard deviations.
    pub error_sigmas: f64,
    /// `|empirical / exact - 1|` for mean queries.
    pub queries_rel_diff: f64,
}

impl Agreement {
    pub fn new(exact_error: f64, exact_queries: f64, run: &ExperimentResult) -> Self {
        let trials = run.aggregate.trials as f64;
        let sigma = (exact_error * (1.0 - exact_error) / trials).sqrt();
        let diff = (run.aggregate.error_rate - exact_error).abs();
        let error_sigmas = if sigma > 0.0 {
            diff / sigma
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            exact_error,
            exact_queries,
            empirical_error: run.aggregate.error_rate,
            empirical_queries: run.aggregate.mean_queries,
            error_sigmas,
            queries_rel_diff: (run.aggregate.mean_queries / exact_queries - 1.0).abs(),
        }
    }
}

fn label(c: &ExperimentConfig) -> String {
    format!("{} {} n={} p={} delta={}", c.algorithm, c.instance, c.n, c.p, c.delta)
}

/// Runs the cross-checks. `trials = 0` skips the Monte Carlo comparison.
pub fn run_verification(trials: u64, seed: u64) -> Result<Vec<CheckLine>> {
    let mut lines = Vec::new();

    let mut worst = 0.0f64;
    for p in [0.05, 0.1, 0.25, 0.4, 0.45] {
        for k in 1..=30 {
            let w = analyze_walk(p, k)?;
            let (err, time) = markov_walk_analysis(p, k)?;
            worst = worst
                .max((w.error_probability / err - 1.0).abs())
                .max((w.expected_queries / time - 1.0).abs());
        }
    }
    lines.push(CheckLine {
        name: "walk closed form vs linear solve".into(),
        passed: worst < 1e-12,
        detail: format!("max relative difference {worst:.3e} (K <= 30)"),
    });

    for config in enumerable_configurations() {
        let exact = exact_for(&config)?;
        let bound = config.algorithm.exact().expect("enumerable").error_bound(config.delta);
        let mut passed = exact.error_probability <= bound;
        let mut detail = format!(
            "exact error {:.6e} <= {bound}, exact mean queries {:.4}",
            exact.error_probability, exact.expected_queries
        );
        if trials > 0 {
            let run = run_experiment(&config.clone().trials(trials).seed(seed))?;
            let a = Agreement::new(exact.error_probability, exact.expected_queries, &run);
            passed &= a.error_sigmas <= 4.0 && a.queries_rel_diff <= 0.02;
            detail.push_str(&format!(
                "; monte carlo error {:.6e} ({:.2} sigma), mean {:.4} ({:.3}%)",
                a.empirical_error,
                a.error_sigmas,
                a.empirical_queries,
                100.0 * a.queries_rel_diff
            ));
        }
        lines.push(CheckLine {
            name: label(&config),
            passed,
            detail,
        });
    }
    Ok(lines)
}
