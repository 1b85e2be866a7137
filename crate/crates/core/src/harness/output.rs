use std::io::Write;

use serde::Serialize;

use crate::error::Result;

use super::runner::ExperimentResult;
use super::stats::{AggregateStats, ExtraStats, TrialStats};

/// CSV column order; matches the field order of [`AggregateStats`].
pub const CSV_COLUMNS: [&str; 20] = [
    "algorithm",
    "instance",
    "n",
    "p",
    "delta",
    "trials",
    "seed",
    "errors",
    "error_rate",
    "error_ci_lo",
    "error_ci_hi",
    "mean_queries",
    "queries_ci_lo",
    "queries_ci_hi",
    "max_queries",
    "phase1_mean_queries",
    "subroutine_mean_queries",
    "theory_upper_budget",
    "theory_lecam_m_at_delta",
    "ratio_mean_over_upper",
];

pub fn write_csv<W: Write>(rows: &[ExperimentResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in rows {
        w.serialize(&r.aggregate)?;
    }
    w.flush()?;
    Ok(())
}

/// Raw per-trial rows, tagged with the index of the row they belong to.
pub fn write_trials_csv<W: Write>(rows: &[ExperimentResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRIAL_COLUMNS)?;
    for (k, r) in rows.iter().enumerate() {
        for t in &r.trials {
            w.write_record(&[
                k.to_string(),
                r.aggregate.algorithm.clone(),
                r.aggregate.n.to_string(),
                r.aggregate.p.to_string(),
                r.aggregate.delta.to_string(),
                t.trial_index.to_string(),
                t.correct.to_string(),
                t.queries.to_string(),
                t.phase1_queries.to_string(),
                t.subroutine_queries.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[ExperimentResult], raw_trials: bool, out: W) -> Result<()> {
    #[derive(Serialize)]
    struct Row<'a> {
        #[serde(flatten)]
        aggregate: &'a AggregateStats,
        #[serde(flatten)]
        extra: &'a ExtraStats,
        #[serde(skip_serializing_if = "Option::is_none")]
        trials: Option<&'a [TrialStats]>,
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        log_base: &'static str,
        rows: Vec<Row<'a>>,
    }
    let doc = Doc {
        log_base: "natural (nats)",
        rows: rows
            .iter()
            .map(|r| Row {
                aggregate: &r.aggregate,
                extra: &r.extra,
                trials: raw_trials.then_some(r.trials.as_slice()),
            })
            .collect(),
    };
    serde_json::to_writer_pretty(out, &doc)?;
    Ok(())
}

pub const TRIAL_COLUMNS: [&str; 10] = [
    "row",
    "algorithm",
    "n",
    "p",
    "delta",
    "trial_index",
    "correct",
    "queries",
    "phase1_queries",
    "subroutine_queries",
];
