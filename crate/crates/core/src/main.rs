use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use noisy_query::bounds::BoundReport;
use noisy_query::harness::{
    parse_float_grid, parse_int_grid, run_experiment, run_sweep, run_verification, write_csv,
    write_json, write_trials_csv, Algorithm, ExperimentConfig, ExperimentResult, InstanceSpec,
    OutputFormat, SweepGrid,
};
use noisy_query::{Error, Result};

#[derive(Parser)]
#[command(name = "noisy-query", version, about = "Noisy OR / MAX query-complexity simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every closed-form bound for one parameter point.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        p: f64,
        /// Emit JSON instead of key = value lines.
        #[arg(long)]
        json: bool,
    },
    /// Run one Monte Carlo experiment.
    Run {
        #[command(flatten)]
        common: Common,
        /// Instance length; defaults to the literal's length.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        delta: f64,
        /// Bit read by `checkbit`.
        #[arg(long, default_value_t = 0)]
        target: usize,
        /// Pair compared by `noisycompare`, as `I,J`.
        #[arg(long, default_value = "0,1")]
        pair: String,
    },
    /// Run one experiment per point of an (n, p, delta) grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `a,b,c` or `start:stop:step`.
        #[arg(long)]
        n: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        delta: String,
    },
    /// Cross-check the exact oracle against closed forms and Monte Carlo.
    Verify {
        /// Monte Carlo trials per configuration (0 skips Monte Carlo).
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    algorithm: String,
    /// `family[:params]`, e.g. `all_zero`, `single_one:3`, `relocated:2`.
    #[arg(long)]
    instance: String,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Also emit one row per trial.
    #[arg(long)]
    raw_trials: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn config(&self, n: usize, p: f64, delta: f64) -> Result<ExperimentConfig> {
        let algorithm: Algorithm = self.algorithm.parse()?;
        let instance: InstanceSpec = self.instance.parse()?;
        let mut config = ExperimentConfig::new(algorithm, instance, n, p, delta)
            .trials(self.trials)
            .seed(self.seed);
        config.threads = self.threads;
        config.output = self.out.clone();
        config.format = self.format.parse()?;
        config.raw_trials = self.raw_trials;
        Ok(config)
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("pair '{s}' must look like I,J"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn emit(rows: &[ExperimentResult], config: &ExperimentConfig) -> Result<()> {
    match &config.output {
        Some(path) => {
            let file = BufWriter::new(File::create(path)?);
            write_rows(rows, config, file)?;
            if config.raw_trials && config.format == OutputFormat::Csv {
                let raw = trials_path(path);
                write_trials_csv(rows, BufWriter::new(File::create(&raw)?))?;
                info!("per-trial rows written to {}", raw.display());
            }
            info!("results written to {}", path.display());
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_rows(rows, config, &mut lock)?;
            if config.raw_trials && config.format == OutputFormat::Csv {
                writeln!(lock)?;
                write_trials_csv(rows, &mut lock)?;
            }
            lock.flush()?;
        }
    }
    Ok(())
}

fn write_rows<W: Write>(rows: &[ExperimentResult], config: &ExperimentConfig, out: W) -> Result<()> {
    match config.format {
        OutputFormat::Csv => write_csv(rows, out),
        OutputFormat::Json => write_json(rows, config.raw_trials, out),
    }
}

fn trials_path(path: &Path) -> PathBuf {
    let mut name = path.file_stem().unwrap_or_default().to_os_string();
    name.push(".trials.csv");
    path.with_file_name(name)
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Bounds { n, delta, p, json } => {
            let report = BoundReport::new(n, delta, p).map_err(|e| match e {
                Error::Contract(msg) => Error::Config(msg),
                other => other,
            })?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.render());
            }
            Ok(true)
        }
        Command::Run {
            common,
            n,
            p,
            delta,
            target,
            pair,
        } => {
            let instance: InstanceSpec = common.instance.parse()?;
            let n = n
                .or(instance.implied_len())
                .ok_or_else(|| Error::Config("--n is required for this instance family".into()))?;
            let mut config = common.config(n, p, delta)?;
            config.target = target;
            config.pair = parse_pair(&pair)?;
            let result = run_experiment(&config)?;
            emit(&[result], &config)?;
            Ok(true)
        }
        Command::Sweep {
            common,
            n,
            p,
            delta,
        } => {
            let grid = SweepGrid {
                n: parse_int_grid(&n)?,
                p: parse_float_grid(&p)?,
                delta: parse_float_grid(&delta)?,
            };
            let first = (grid.n.first(), grid.p.first(), grid.delta.first());
            let (n0, p0, d0) = match first {
                (Some(&n), Some(&p), Some(&d)) => (n, p, d),
                _ => return Err(Error::Config("sweep grid is empty".into())),
            };
            let config = common.config(n0, p0, d0)?;
            let rows = run_sweep(&config, &grid)?;
            emit(&rows, &config)?;
            Ok(true)
        }
        Command::Verify { trials, seed } => {
            let lines = run_verification(trials, seed)?;
            let mut all = true;
            for line in &lines {
                println!("{}", line.render());
                all &= line.passed;
            }
            println!(
                "{} of {} checks passed",
                lines.iter().filter(|l| l.passed).count(),
                lines.len()
            );
            Ok(all)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
