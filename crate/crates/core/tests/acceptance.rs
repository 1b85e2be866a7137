//! Acceptance run. Every criterion prints one `[PASS]` or `[FAIL]` line and
//! the process exits non-zero if any criterion fails.
//!
//! Monte Carlo seeds are fixed so the run is reproducible.

use std::process::ExitCode;
use std::time::Instant;

use noisy_query::bounds::{lecam_floor, upper_budget, BoundReport};
use noisy_query::exact_oracle::analyze_walk;
use noisy_query::harness::{
    enumerable_configurations, exact_for, run_experiment, run_sweep, write_csv, Agreement,
    Algorithm, ExperimentConfig, ExperimentResult, InstanceSpec, SweepGrid,
};
use noisy_query::primitives::vote_threshold;

/// Criterion k draws from seeds near `SEED + 100 k`.
const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            passed: true,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, note: String) {
        if !ok {
            self.passed = false;
            self.notes.push(format!("violated: {note}"));
        } else {
            self.notes.push(note);
        }
    }
}

fn run(config: ExperimentConfig) -> ExperimentResult {
    run_experiment(&config).unwrap_or_else(|e| panic!("{config:?}: {e}"))
}

fn binomial_sigma(q: f64, trials: u64) -> f64 {
    (q * (1.0 - q) / trials as f64).sqrt()
}

const PRIMITIVE_PS: [f64; 3] = [0.1, 0.25, 0.4];
const PRIMITIVE_DELTAS: [f64; 3] = [0.05, 0.01, 0.001];
const PRIMITIVE_TRIALS: u64 = 100_000;

/// Configurations for the single-call primitives: both truth values, half
/// the trials each, on separate seeds so the halves are independent.
fn primitive_configs(alg: Algorithm, p: f64, delta: f64) -> Vec<ExperimentConfig> {
    let half = PRIMITIVE_TRIALS / 2;
    match alg {
        Algorithm::CheckBit => vec![
            ExperimentConfig::new(alg, InstanceSpec::AllZero, 1, p, delta).trials(half),
            ExperimentConfig::new(alg, InstanceSpec::SingleOne(1), 1, p, delta)
                .trials(half)
                .seed(1),
        ],
        Algorithm::NoisyCompare => {
            let mut forward = ExperimentConfig::new(alg, InstanceSpec::Sorted, 2, p, delta).trials(half);
            forward.pair = (0, 1);
            let mut backward = forward.clone().seed(1);
            backward.pair = (1, 0);
            vec![forward, backward]
        }
        _ => unreachable!(),
    }
}

fn primitive_criterion(alg: Algorithm, seed: u64) -> Outcome {
    let mut out = Outcome::new();
    for p in PRIMITIVE_PS {
        for delta in PRIMITIVE_DELTAS {
            let k = vote_threshold(p, delta).unwrap();
            let walk = analyze_walk(p, k).unwrap();
            let mean_bound = k as f64 / (1.0 - 2.0 * p);

            let runs: Vec<_> = primitive_configs(alg, p, delta)
                .into_iter()
                .map(|c| {
                    let offset = c.master_seed;
                    run(c.seed(seed + offset))
                })
                .collect();
            let trials: u64 = runs.iter().map(|r| r.aggregate.trials).sum();
            let errors: u64 = runs.iter().map(|r| r.aggregate.errors).sum();
            let queries: f64 = runs
                .iter()
                .map(|r| r.aggregate.mean_queries * r.aggregate.trials as f64)
                .sum();
            let rate = errors as f64 / trials as f64;
            let mean = queries / trials as f64;
            let mean_se = runs
                .iter()
                .map(|r| r.extra.queries_std.powi(2) * r.aggregate.trials as f64)
                .sum::<f64>()
                .sqrt()
                / trials as f64;
            let error_se = binomial_sigma(walk.error_probability, trials);
            let sigmas = (rate - walk.error_probability).abs() / error_se;
            let rel = (mean / walk.expected_queries - 1.0).abs();

            out.check(
                sigmas <= 3.0 && rel <= 0.01,
                format!(
                    "p={p} delta={delta} K={k}: error {rate:.6} vs {:.6} ({sigmas:.2} sigma), \
                     mean {mean:.4} vs {:.4} ({:.3}%)",
                    walk.error_probability,
                    walk.expected_queries,
                    100.0 * rel
                ),
            );
            // the bounds are on expectations; sample values get three standard errors
            out.check(
                walk.error_probability <= delta && rate <= delta + 3.0 * error_se,
                format!("p={p} delta={delta}: error within delta"),
            );
            out.check(
                walk.expected_queries <= mean_bound && mean <= mean_bound + 3.0 * mean_se,
                format!(
                    "p={p} delta={delta}: mean within K/(1-2p) = {mean_bound:.4} (standard error {mean_se:.4})"
                ),
            );
        }
    }
    let anchor = analyze_walk(0.25f64, vote_threshold(0.25f64, 0.01).unwrap()).unwrap();
    out.check(
        (anchor.error_probability - 0.0040984).abs() < 5e-8 && (anchor.expected_queries - 9.918).abs() < 5e-4,
        format!(
            "anchor p=0.25 delta=0.01: error {:.7}, mean {:.4}",
            anchor.error_probability, anchor.expected_queries
        ),
    );
    out
}

fn criterion_1() -> Outcome {
    primitive_criterion(Algorithm::CheckBit, SEED + 100)
}

fn criterion_2() -> Outcome {
    primitive_criterion(Algorithm::NoisyCompare, SEED + 200)
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    let configs = enumerable_configurations();
    let mut worst_sigma = 0.0f64;
    let mut worst_rel = 0.0f64;
    for config in &configs {
        let exact = exact_for(config).unwrap();
        let bound = config.algorithm.exact().unwrap().error_bound(config.delta);
        let result = run(config.clone().trials(100_000).seed(SEED + 300));
        let a = Agreement::new(exact.error_probability, exact.expected_queries, &result);
        worst_sigma = worst_sigma.max(a.error_sigmas);
        worst_rel = worst_rel.max(a.queries_rel_diff);
        let label = format!(
            "{} {} n={} p={} delta={}",
            config.algorithm, config.instance, config.n, config.p, config.delta
        );
        if a.error_sigmas > 4.0 || a.queries_rel_diff > 0.02 {
            out.check(
                false,
                format!(
                    "{label}: error {:.3e} vs exact {:.3e} ({:.2} sigma), mean {:.4} vs {:.4}",
                    a.empirical_error, a.exact_error, a.error_sigmas, a.empirical_queries, a.exact_queries
                ),
            );
        }
        if exact.error_probability > bound {
            out.check(
                false,
                format!("{label}: exact error {:.3e} above {bound}", exact.error_probability),
            );
        }
    }
    out.notes.push(format!(
        "{} configurations; worst error gap {worst_sigma:.2} sigma, worst mean gap {:.3}%",
        configs.len(),
        100.0 * worst_rel
    ));
    out
}

const SCALE_N: usize = 1000;
const SCALE_P: f64 = 0.25;
const SCALE_DELTA: f64 = 0.01;
const SCALE_TRIALS: u64 = 10_000;

fn scale_criterion(alg: Algorithm, instances: &[InstanceSpec], error_bound: f64, seed: u64) -> Outcome {
    let mut out = Outcome::new();
    let ceiling = 1.5 * upper_budget(SCALE_N, SCALE_DELTA, SCALE_P).unwrap();
    for inst in instances {
        let r = run(
            ExperimentConfig::new(alg, inst.clone(), SCALE_N, SCALE_P, SCALE_DELTA)
                .trials(SCALE_TRIALS)
                .seed(seed),
        );
        let a = &r.aggregate;
        out.check(
            a.error_rate <= error_bound,
            format!(
                "{inst}: error {:.4} (Wilson [{:.4}, {:.4}]) <= {error_bound}",
                a.error_rate, a.error_ci_lo, a.error_ci_hi
            ),
        );
        out.check(
            a.mean_queries <= ceiling,
            format!(
                "{inst}: mean queries {:.1} (ratio {:.4}; phase one {:.1}, subroutine {:.1}) <= {ceiling:.1}",
                a.mean_queries, a.ratio_mean_over_upper, a.phase1_mean_queries, a.subroutine_mean_queries
            ),
        );
    }
    out
}

fn criterion_4() -> Outcome {
    let instances = [
        InstanceSpec::AllZero,
        InstanceSpec::SingleOne(1),
        InstanceSpec::SingleOne(500),
        InstanceSpec::SingleOne(1000),
    ];
    scale_criterion(Algorithm::NoisyOr, &instances, 2.0 * SCALE_DELTA, SEED + 400)
}

fn criterion_5() -> Outcome {
    let instances = [
        InstanceSpec::Sorted,
        InstanceSpec::Relocated(1),
        InstanceSpec::Relocated(500),
        InstanceSpec::Relocated(999),
    ];
    scale_criterion(Algorithm::NoisyMax, &instances, 3.0 * SCALE_DELTA, SEED + 500)
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    let grid = SweepGrid {
        n: vec![100, 1000, 10_000],
        p: vec![0.25],
        delta: vec![0.01],
    };
    for (alg, inst) in [
        (Algorithm::NoisyOr, InstanceSpec::AllZero),
        (Algorithm::NoisyMax, InstanceSpec::Sorted),
    ] {
        let base = ExperimentConfig::new(alg, inst, 100, 0.25, 0.01)
            .trials(10_000)
            .seed(SEED + 600);
        let rows = run_sweep(&base, &grid).unwrap();
        let ratios: Vec<(f64, f64, f64)> = rows
            .iter()
            .map(|r| {
                let b = r.aggregate.theory_upper_budget;
                (
                    r.aggregate.ratio_mean_over_upper,
                    r.aggregate.queries_ci_lo / b,
                    r.aggregate.queries_ci_hi / b,
                )
            })
            .collect();
        // a later ratio may exceed an earlier one only while the intervals overlap
        let trend = ratios.windows(2).all(|w| w[1].0 <= w[0].0 || w[1].1 <= w[0].2);
        let listing: Vec<String> = rows
            .iter()
            .zip(&ratios)
            .map(|(r, (m, lo, hi))| format!("n={}: {m:.4} [{lo:.4}, {hi:.4}]", r.aggregate.n))
            .collect();
        out.check(trend, format!("{alg}: {}", listing.join(", ")));
    }
    out
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let mut worst = 0.0f64;
    let mut points = 0;
    for n in [10, 100, 1000, 10_000, 100_000] {
        for p in [0.05, 0.1, 0.25, 0.4, 0.45] {
            for delta in [0.1f64, 0.05, 0.01, 0.001, 1e-6] {
                let m: f64 = upper_budget(n, delta, p).unwrap() * (1.0 + 4f64.ln() / (1.0 / delta).ln());
                let floor = lecam_floor(n, m, p).unwrap();
                worst = worst.max(floor / delta);
                points += 1;
                if floor > delta * (1.0 + 1e-12) {
                    out.check(false, format!("n={n} p={p} delta={delta}: floor {floor:.3e} > delta"));
                }
            }
        }
    }
    out.notes.push(format!("{points} grid points, max floor/delta {worst:.12}"));

    let report = BoundReport::<f64>::new(1000, 0.01, 0.25).unwrap();
    out.check(
        lecam_floor(1000, 0.0, 0.25).unwrap() == 0.25 && report.render().contains("lecam_floor_at_m0 = 0.25"),
        "floor at m=0 is 1/4".into(),
    );
    let m: f64 = report.lower_budget;
    out.check(
        (m / 5859.93 - 1.0).abs() < 1e-5 && (lecam_floor(1000, m, 0.25).unwrap() - 0.01).abs() < 1e-15,
        format!("m at delta=0.01, n=1000, p=0.25 is {m:.4} (anchor 5859.93)"),
    );
    out
}

fn csv_bytes(config: &ExperimentConfig) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(&[run(config.clone())], &mut buf).unwrap();
    buf
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    let mut compared = 0;
    for alg in [Algorithm::CheckBit, Algorithm::NoisyCompare] {
        for p in PRIMITIVE_PS {
            for delta in PRIMITIVE_DELTAS {
                for config in primitive_configs(alg, p, delta) {
                    let offset = config.master_seed;
                    let config = config.seed(SEED + 800 + offset);
                    let reference = csv_bytes(&config.clone().threads(1));
                    for threads in [1, 2, 4] {
                        compared += 1;
                        if csv_bytes(&config.clone().threads(threads)) != reference {
                            out.check(
                                false,
                                format!("{alg} p={p} delta={delta} differs at {threads} threads"),
                            );
                        }
                    }
                }
            }
        }
    }
    let sweep = |threads: usize| {
        let base = ExperimentConfig::new(Algorithm::NoisyMax, InstanceSpec::Sorted, 50, 0.25, 0.01)
            .trials(2000)
            .seed(SEED + 800)
            .threads(threads);
        let grid = SweepGrid {
            n: vec![50, 200],
            p: vec![0.1, 0.25],
            delta: vec![0.01],
        };
        let mut buf = Vec::new();
        write_csv(&run_sweep(&base, &grid).unwrap(), &mut buf).unwrap();
        buf
    };
    out.check(sweep(1) == sweep(4), "noisy-max sweep identical at 1 and 4 threads".into());
    out.notes.push(format!("{compared} reruns byte-identical"));
    out
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    // `cargo test --test acceptance -- 1 3` runs criteria 1 and 3 only
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [Criterion; 8] = [
        ("criterion 1: CheckBit matches its walk law", criterion_1),
        ("criterion 2: NoisyCompare matches its walk law", criterion_2),
        ("criterion 3: small instances match exact enumeration", criterion_3),
        ("criterion 4: NoisyOR at n=1000", criterion_4),
        ("criterion 5: NoisyMax at n=1000", criterion_5),
        ("criterion 6: ratio to the leading term is non-increasing in n", criterion_6),
        ("criterion 7: lower-bound arithmetic and anchors", criterion_7),
        ("criterion 8: reruns are byte-identical at any thread count", criterion_8),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = f();
        for note in &outcome.notes {
            println!("    {note}");
        }
        println!(
            "[{}] {name} ({:.1}s)",
            if outcome.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        if !outcome.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
