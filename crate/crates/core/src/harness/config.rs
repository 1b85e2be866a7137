use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_oracle::{ExactAlgorithm, ExactInstance};
use crate::oracles::{
    make_instance_max, make_instance_or, BitInstance, MaxFamily, OrFamily, ValueInstance,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    #[serde(rename = "checkbit")]
    CheckBit,
    #[serde(rename = "noisycompare")]
    NoisyCompare,
    TournamentOr,
    TournamentMax,
    NoisyOr,
    NoisyMax,
}

/// Which query model an algorithm runs against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Bits,
    Comparisons,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::CheckBit,
        Algorithm::NoisyCompare,
        Algorithm::TournamentOr,
        Algorithm::TournamentMax,
        Algorithm::NoisyOr,
        Algorithm::NoisyMax,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::CheckBit => "checkbit",
            Algorithm::NoisyCompare => "noisycompare",
            Algorithm::TournamentOr => "tournament-or",
            Algorithm::TournamentMax => "tournament-max",
            Algorithm::NoisyOr => "noisy-or",
            Algorithm::NoisyMax => "noisy-max",
        }
    }

    pub fn model(&self) -> Model {
        match self {
            Algorithm::CheckBit | Algorithm::TournamentOr | Algorithm::NoisyOr => Model::Bits,
            _ => Model::Comparisons,
        }
    }

    /// The enumerable counterpart, when there is one.
    pub fn exact(&self) -> Option<ExactAlgorithm> {
        match self {
            Algorithm::TournamentOr => Some(ExactAlgorithm::TournamentOr),
            Algorithm::TournamentMax => Some(ExactAlgorithm::TournamentMax),
            Algorithm::NoisyOr => Some(ExactAlgorithm::NoisyOr),
            Algorithm::NoisyMax => Some(ExactAlgorithm::NoisyMax),
            Algorithm::CheckBit | Algorithm::NoisyCompare => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown algorithm '{s}'; expected one of checkbit, noisycompare, \
                     tournament-or, tournament-max, noisy-or, noisy-max"
                ))
            })
    }
}

/// An instance family with its parameters, written `family[:params]`.
///
/// `single_one:J` and `relocated:I` take 1-based positions; `literal:` takes
/// a comma-separated list (0/1 for bits, reals for values).
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSpec {
    AllZero,
    SingleOne(usize),
    Sorted,
    Relocated(usize),
    Permuted(u64),
    Literal(Vec<f64>),
}

impl InstanceSpec {
    /// Length implied by the spec itself (literals only).
    pub fn implied_len(&self) -> Option<usize> {
        match self {
            InstanceSpec::Literal(v) => Some(v.len()),
            _ => None,
        }
    }

    pub fn build(&self, model: Model, n: usize) -> Result<BuiltInstance> {
        let mismatch = || {
            Error::Config(format!(
                "instance '{self}' does not fit the {} model",
                match model {
                    Model::Bits => "bit-read",
                    Model::Comparisons => "comparison",
                }
            ))
        };
        match model {
            Model::Bits => {
                let family = match self {
                    InstanceSpec::AllZero => OrFamily::AllZero,
                    InstanceSpec::SingleOne(j) => OrFamily::SingleOne(*j),
                    InstanceSpec::Literal(v) => OrFamily::Literal(
                        v.iter()
                            .map(|&x| {
                                if x == 0.0 {
                                    Ok(false)
                                } else if x == 1.0 {
                                    Ok(true)
                                } else {
                                    Err(Error::Config(format!("bit literal {x} is not 0 or 1")))
                                }
                            })
                            .collect::<Result<_>>()?,
                    ),
                    _ => return Err(mismatch()),
                };
                Ok(BuiltInstance::Bits(make_instance_or(&family, n).map_err(config)?))
            }
            Model::Comparisons => {
                let family = match self {
                    InstanceSpec::Sorted => MaxFamily::Sorted,
                    InstanceSpec::Relocated(i) => MaxFamily::Relocated(*i),
                    InstanceSpec::Permuted(s) => MaxFamily::Permuted(*s),
                    InstanceSpec::Literal(v) => MaxFamily::Literal(v.clone()),
                    _ => return Err(mismatch()),
                };
                Ok(BuiltInstance::Values(make_instance_max(&family, n).map_err(config)?))
            }
        }
    }
}

fn config(e: Error) -> Error {
    match e {
        Error::Contract(msg) => Error::Config(msg),
        other => other,
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceSpec::AllZero => write!(f, "all_zero"),
            InstanceSpec::SingleOne(j) => write!(f, "single_one:{j}"),
            InstanceSpec::Sorted => write!(f, "sorted"),
            InstanceSpec::Relocated(i) => write!(f, "relocated:{i}"),
            InstanceSpec::Permuted(s) => write!(f, "permuted:{s}"),
            InstanceSpec::Literal(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "literal:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for InstanceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, params) = match s.split_once(':') {
            Some((f, p)) => (f, Some(p)),
            None => (s, None),
        };
        let need = |what: &str| {
            params.ok_or_else(|| Error::Config(format!("instance family '{family}' needs {what}")))
        };
        let int = |what: &str| -> Result<u64> {
            let raw = need(what)?;
            raw.trim()
                .parse()
                .map_err(|_| Error::Config(format!("'{raw}' is not a valid {what}")))
        };
        let spec = match family {
            "all_zero" => InstanceSpec::AllZero,
            "sorted" => InstanceSpec::Sorted,
            "single_one" => InstanceSpec::SingleOne(int("position")? as usize),
            "relocated" => InstanceSpec::Relocated(int("position")? as usize),
            "permuted" => InstanceSpec::Permuted(int("seed")?),
            "literal" => {
                let raw = need("a value list")?;
                let values = raw
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Config(format!("'{t}' is not a number")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                InstanceSpec::Literal(values)
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown instance family '{other}'; expected all_zero, single_one:J, \
                     sorted, relocated:I, permuted:SEED or literal:V1,V2,..."
                )))
            }
        };
        if params.is_some() && matches!(spec, InstanceSpec::AllZero | InstanceSpec::Sorted) {
            return Err(Error::Config(format!("instance family '{family}' takes no parameters")));
        }
        Ok(spec)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BuiltInstance {
    Bits(BitInstance),
    Values(ValueInstance<f64>),
}

impl BuiltInstance {
    pub fn to_exact(&self) -> ExactInstance {
        match self {
            BuiltInstance::Bits(b) => ExactInstance::Bits(b.clone()),
            BuiltInstance::Values(v) => ExactInstance::Values(v.clone()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format '{other}'; expected csv or json"))),
        }
    }
}

/// One Monte Carlo campaign.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub instance: InstanceSpec,
    pub n: usize,
    pub p: f64,
    pub delta: f64,
    pub trials: u64,
    pub master_seed: u64,
    /// Bit read by `checkbit`.
    pub target: usize,
    /// Pair compared by `noisycompare`.
    pub pair: (usize, usize),
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub raw_trials: bool,
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm, instance: InstanceSpec, n: usize, p: f64, delta: f64) -> Self {
        Self {
            algorithm,
            instance,
            n,
            p,
            delta,
            trials: 1,
            master_seed: 0,
            target: 0,
            pair: (0, 1),
            threads: None,
            output: None,
            format: OutputFormat::Csv,
            raw_trials: false,
        }
    }

    pub fn trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let in_half = |x: f64| x > 0.0 && x < 0.5;
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.n == 0 {
            return Err(Error::Config("n must be >= 1".into()));
        }
        if !in_half(self.p) {
            return Err(Error::Config(format!("p = {} must lie in (0, 1/2)", self.p)));
        }
        if !in_half(self.delta) {
            return Err(Error::Config(format!("delta = {} must lie in (0, 1/2)", self.delta)));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be >= 1".into()));
        }
        match self.algorithm {
            Algorithm::CheckBit if self.target >= self.n => {
                return Err(Error::Config(format!(
                    "target bit {} out of range for n = {}",
                    self.target, self.n
                )))
            }
            Algorithm::NoisyCompare => {
                let (i, j) = self.pair;
                if i == j || i >= self.n || j >= self.n {
                    return Err(Error::Config(format!(
                        "pair ({i}, {j}) must be two distinct indices below n = {}",
                        self.n
                    )));
                }
            }
            _ => {}
        }
        self.build_instance().map(|_| ())
    }

    pub fn build_instance(&self) -> Result<BuiltInstance> {
        self.instance.build(self.algorithm.model(), self.n)
    }
}
