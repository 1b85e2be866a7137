//! Monte Carlo experiments: configuration, parallel trial execution,
//! aggregation with confidence intervals, and CSV/JSON output.

pub mod config;
pub mod grid;
pub mod output;
pub mod runner;
pub mod stats;
pub mod verify;

pub use config::{Algorithm, BuiltInstance, ExperimentConfig, InstanceSpec, Model, OutputFormat};
pub use grid::{parse_float_grid, parse_int_grid, SweepGrid};
pub use output::{write_csv, write_json, write_trials_csv, CSV_COLUMNS};
pub use runner::{run_experiment, run_sweep, run_trial, ExperimentResult};
pub use stats::{aggregate, wilson_interval, AggregateStats, ExtraStats, TrialStats, Z_95};
pub use verify::{enumerable_configurations, exact_for, run_verification, Agreement, CheckLine};
