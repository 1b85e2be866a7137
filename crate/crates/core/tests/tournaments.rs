//! Knockout tournaments: noiseless correctness, round schedule, and
//! agreement with exact enumeration beyond the acceptance sizes.

use proptest::prelude::*;

use noisy_query::bounds::{tournament_budget, DEFAULT_TOURNAMENT_CONSTANT};
use noisy_query::exact_oracle::{analyze_walk, enumerate_tournament, ExactAlgorithm, ExactInstance};
use noisy_query::harness::{exact_for, run_experiment, Agreement, Algorithm, ExperimentConfig, InstanceSpec};
use noisy_query::oracles::{
    BitInstance, ForcedResponseStream, NoiseSource, NoisyOracle, TrialKey, ValueInstance,
};
use noisy_query::tournaments::{tournament_max, tournament_or, RoundSchedule};

fn truthful() -> NoiseSource {
    NoiseSource::forced(ForcedResponseStream::truthful())
}

/// Smallest margin d with d ln λ >= ln(1-ε) - ln ε, where ln ε = `ln_eps`.
fn margin(p: f64, ln_eps: f64) -> u64 {
    let log_odds = (-ln_eps.exp()).ln_1p() - ln_eps;
    let step = ((1.0 - p) / p).ln();
    let mut d = 1;
    while (d as f64) * step < log_odds * (1.0 - 1e-13) {
        d += 1;
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn noiseless_or_is_exact(bits in proptest::collection::vec(any::<bool>(), 1..=64)) {
        let truth = bits.iter().any(|&b| b);
        let inst = BitInstance::new(bits).unwrap();
        let all: Vec<usize> = (0..inst.len()).collect();
        let mut o = NoisyOracle::new(inst, 0.25, truthful()).unwrap();
        let r = tournament_or(&mut o, &all, 0.01, 0.25).unwrap();
        prop_assert_eq!(r.output, truth);
        prop_assert_eq!(r.queries_used, o.ledger().total());
    }

    #[test]
    fn noiseless_max_is_exact(values in proptest::collection::hash_set(-1000i32..1000, 1..=64)) {
        let values: Vec<f64> = values.into_iter().map(f64::from).collect();
        let inst = ValueInstance::new(values).unwrap();
        let truth = inst.truth();
        let all: Vec<usize> = (0..inst.len()).collect();
        let mut o = NoisyOracle::new(inst, 0.1, truthful()).unwrap();
        let r = tournament_max(&mut o, &all, 0.05, 0.1).unwrap();
        prop_assert_eq!(r.output, truth);
    }

    #[test]
    fn subset_tournaments_return_members(seed in 0u64..1000, r in 1usize..20) {
        let inst = ValueInstance::new((0..40).map(|x| ((x * 17) % 40) as f64).collect()).unwrap();
        let subset: Vec<usize> = (0..r).map(|k| (k * 7 + seed as usize) % 40).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let mut o = NoisyOracle::seeded(inst, 0.3, TrialKey::new(seed, 0)).unwrap();
        let out = tournament_max(&mut o, &subset, 0.1, 0.3).unwrap().output;
        prop_assert!(subset.contains(&out));
    }
}

#[test]
fn schedule_follows_squared_odd_powers() {
    for &(p, delta) in &[(0.1f64, 0.05f64), (0.25, 0.01), (0.4, 0.001), (0.45, 1e-6)] {
        let inst = BitInstance::new(vec![false; 1024]).unwrap();
        let all: Vec<usize> = (0..1024).collect();
        let mut o = NoisyOracle::new(inst, p, truthful()).unwrap();
        let r = tournament_or(&mut o, &all, delta, p).unwrap();
        assert_eq!(r.rounds.len(), 10);
        for (i, round) in r.rounds.iter().enumerate() {
            let i = i + 1;
            let exponent = (2 * (2 * i - 1)) as f64;
            assert_eq!(round.round, i);
            assert_eq!(round.matches, 1024 >> i);
            assert!((round.ln_tolerance / (exponent * delta.ln()) - 1.0).abs() < 1e-14);
            assert_eq!(round.threshold, margin(p, exponent * delta.ln()), "p={p} delta={delta} round {i}");
        }
        assert_eq!(r.final_threshold, Some(margin(p, delta.ln())));
        // noiseless: every match costs exactly its threshold
        let expected: u64 = r.rounds.iter().map(|x| x.matches as u64 * x.threshold).sum::<u64>()
            + r.final_threshold.unwrap();
        assert_eq!(r.queries_used, expected);
    }
}

#[test]
fn late_rounds_do_not_underflow() {
    // δ^(2(2i-1)) underflows f64 long before round 40
    let s = RoundSchedule::new(1e-6f64).unwrap();
    for round in [1, 10, 40, 200] {
        let k = s.threshold(round, 0.25).unwrap();
        assert_eq!(k, margin(0.25, s.ln_round_error(round)));
    }
    assert_eq!(s.round_error(40), 0.0);
}

#[test]
fn bye_is_carried_unplayed() {
    // bracket (0, 1, 2): 0 vs 1 in round 1, 2 waits
    let inst = ValueInstance::new(vec![1.0, 2.0, 3.0]).unwrap();
    let mut o = NoisyOracle::new(inst, 0.25, truthful()).unwrap();
    let r = tournament_max(&mut o, &[0, 1, 2], 0.1, 0.25).unwrap();
    assert_eq!(r.output, 2);
    assert_eq!(r.rounds.iter().map(|x| x.matches).collect::<Vec<_>>(), vec![1, 1]);
    assert_eq!(o.ledger().pair_count(0, 2), 0);
    assert_eq!(o.ledger().pair_count(0, 1), r.rounds[0].threshold);
    assert_eq!(o.ledger().pair_count(1, 2), r.rounds[1].threshold);
}

fn agree(config: ExperimentConfig) {
    let exact = exact_for(&config).unwrap();
    let bound = config.algorithm.exact().unwrap().error_bound(config.delta);
    assert!(exact.error_probability <= bound);
    let run = run_experiment(&config.clone().trials(20_000).seed(41)).unwrap();
    let a = Agreement::new(exact.error_probability, exact.expected_queries, &run);
    assert!(
        a.error_sigmas <= 4.0 && a.queries_rel_diff <= 0.02,
        "{} {} n={}: {a:?}",
        config.algorithm,
        config.instance,
        config.n
    );
}

#[test]
fn larger_brackets_match_enumeration() {
    for n in [5, 6, 7, 8] {
        for inst in [InstanceSpec::AllZero, InstanceSpec::SingleOne(n)] {
            agree(ExperimentConfig::new(Algorithm::TournamentOr, inst, n, 0.3, 0.1));
        }
        for inst in [InstanceSpec::Sorted, InstanceSpec::Relocated(2)] {
            agree(ExperimentConfig::new(Algorithm::TournamentMax, inst, n, 0.3, 0.1));
        }
    }
}

/// Union bound on tournament error: every match at round i is wrong with
/// the walk error at that round's margin, plus the closing check for OR.
fn union_bound(r: usize, p: f64, delta: f64, or: bool) -> f64 {
    let mut total = 0.0;
    let mut survivors = r;
    let mut round = 1;
    while survivors > 1 {
        let k = margin(p, (2 * (2 * round - 1)) as f64 * delta.ln());
        total += (survivors / 2) as f64 * analyze_walk(p, k).unwrap().error_probability;
        survivors -= survivors / 2;
        round += 1;
    }
    if or {
        total += analyze_walk(p, margin(p, delta.ln())).unwrap().error_probability;
    }
    total
}

fn enumerate_all(n: usize, p: f64, delta: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let bits = BitInstance::new((0..n).map(|i| mask >> i & 1 == 1).collect()).unwrap();
        let r = enumerate_tournament(&ExactInstance::Bits(bits), ExactAlgorithm::TournamentOr, delta, p).unwrap();
        out.push(r.error_probability);
    }
    for pos in 0..n {
        let mut v: Vec<f64> = (0..n).map(|i| i as f64).collect();
        v.swap(pos, n - 1);
        let inst = ExactInstance::Values(ValueInstance::new(v).unwrap());
        let r = enumerate_tournament(&inst, ExactAlgorithm::TournamentMax, delta, p).unwrap();
        out.push(r.error_probability);
    }
    out
}

#[test]
fn enumerated_error_within_union_bound() {
    for p in [0.05, 0.2, 0.35, 0.45] {
        for delta in [0.2, 0.05, 0.001] {
            for n in 1..=6usize {
                let bound = union_bound(n, p, delta, true);
                for e in enumerate_all(n, p, delta) {
                    assert!(e <= bound * (1.0 + 1e-12), "p={p} delta={delta} n={n}: {e} > {bound}");
                }
            }
        }
    }
}

#[test]
fn enumerated_error_within_delta_on_acceptance_grid() {
    for p in [0.1, 0.25, 0.4] {
        for delta in [0.05, 0.01] {
            for n in 1..=8usize {
                for e in enumerate_all(n, p, delta) {
                    assert!(e <= delta, "p={p} delta={delta} n={n}: {e}");
                }
            }
        }
    }
}

#[test]
fn tight_closing_check_can_exceed_delta() {
    // p = δ makes the closing check's K = 1 with error exactly δ, so any
    // round-one mistake on a 1-bit pushes the total above δ
    let inst = ExactInstance::Bits(BitInstance::from_digits(&[1, 0]).unwrap());
    let r = enumerate_tournament(&inst, ExactAlgorithm::TournamentOr, 0.05, 0.05).unwrap();
    let e1 = analyze_walk(0.05, 3).unwrap().error_probability;
    assert!((r.error_probability - (0.05 * (1.0 - e1) + 0.95 * e1)).abs() < 1e-15);
    assert!(r.error_probability > 0.05);
}

/// Exact expected tournament cost: matches are fixed per round, so the
/// expectation is a sum of walk expectations.
fn expected_cost(r: usize, p: f64, delta: f64, or: bool) -> f64 {
    let mut total = 0.0;
    let mut survivors = r;
    let mut round = 1;
    while survivors > 1 {
        let k = margin(p, (2 * (2 * round - 1)) as f64 * delta.ln());
        total += (survivors / 2) as f64 * analyze_walk(p, k).unwrap().expected_queries;
        survivors -= survivors / 2;
        round += 1;
    }
    if or {
        total += analyze_walk(p, margin(p, delta.ln())).unwrap().expected_queries;
    }
    total
}

#[test]
fn tournament_cost_within_constant_budget() {
    for p in [0.1, 0.25, 0.4] {
        for delta in [0.05, 0.01] {
            for r in (1..=10).map(|j| 1usize << j).chain([3, 5, 7, 100, 1000]) {
                let budget = tournament_budget(r, delta, p, DEFAULT_TOURNAMENT_CONSTANT).unwrap();
                for or in [true, false] {
                    let cost = expected_cost(r, p, delta, or);
                    assert!(cost <= budget, "r={r} p={p} delta={delta}: {cost} > {budget}");
                }
            }
        }
    }
}

#[test]
fn monte_carlo_cost_matches_round_sum() {
    let (n, p, delta) = (256, 0.25, 0.01);
    let run = run_experiment(
        &ExperimentConfig::new(Algorithm::TournamentMax, InstanceSpec::Sorted, n, p, delta)
            .trials(400)
            .seed(5),
    )
    .unwrap();
    let expected = expected_cost(n, p, delta, false);
    let se = run.extra.queries_std / (400f64).sqrt();
    assert!((run.aggregate.mean_queries - expected).abs() <= 4.0 * se, "{} vs {expected}", run.aggregate.mean_queries);
}
