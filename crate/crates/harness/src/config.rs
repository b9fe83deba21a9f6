//! Run configuration and input parsing.

use std::path::Path;

use num_rational::Ratio;
use qpsi_core::channel::{AdversaryStrategy, BasisPolicy};
use qpsi_core::encoding::{EncodingError, PrivateSet};
use qpsi_core::engine::ProtocolConfig;
use qpsi_core::keygen::KeygenConfig;
use serde::Serialize;
use thiserror::Error;

pub const SEED_ENV: &str = "QPSI_SEED";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("--q is required")]
    MissingModulus,
    #[error("q must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("at least two sets are required, got {0}")]
    TooFewSets(usize),
    #[error("cannot parse set {input:?}: {reason}")]
    InvalidSet { input: String, reason: String },
    #[error("cannot read sets file {path}: {reason}")]
    SetsFile { path: String, reason: String },
    #[error("set {index}: {source}")]
    Set { index: usize, source: EncodingError },
    #[error("{name} must be a fraction in {range}, got {input:?}")]
    Fraction { name: &'static str, range: &'static str, input: String },
    #[error("--f takes two bits such as \"0,1\", got {0:?}")]
    TruthTable(String),
    #[error("{SEED_ENV} must be an unsigned integer, got {0:?}")]
    Seed(String),
    #[error("--shots must be at least 1")]
    Shots,
    #[error("--parallel must be at least 1")]
    Parallel,
    #[error("--decoys-per-message must be at least 1")]
    Decoys,
    #[error("--parties must be at least 2, got {0}")]
    Parties(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryKind {
    None,
    InterceptResend,
    EntangleMeasure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub q: u64,
    pub sets: Vec<Vec<u64>>,
    pub delta: usize,
    pub test_fraction: f64,
    pub error_threshold: f64,
    pub adversary: AdversaryKind,
    /// `U_f` truth table `[f(0), f(1)]`, used by `entangle-measure`.
    pub f: [bool; 2],
    pub decoys_per_message: Option<usize>,
    pub seed: u64,
    pub shots: usize,
    #[serde(skip)]
    pub parallel: usize,
}

impl RunConfig {
    /// Defaults for everything except `q` and `sets`.
    pub fn new(q: u64, sets: Vec<Vec<u64>>) -> Self {
        RunConfig {
            q,
            sets,
            delta: KeygenConfig::default_delta(q as usize),
            test_fraction: 0.125,
            error_threshold: 0.0,
            adversary: AdversaryKind::None,
            f: [false, true],
            decoys_per_message: None,
            seed: 0,
            shots: 1,
            parallel: 1,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.q < 2 {
            return Err(ConfigError::ModulusTooSmall(self.q));
        }
        if self.shots == 0 {
            return Err(ConfigError::Shots);
        }
        if self.parallel == 0 {
            return Err(ConfigError::Parallel);
        }
        if self.decoys_per_message == Some(0) {
            return Err(ConfigError::Decoys);
        }
        self.private_sets().map(|_| ())
    }

    pub fn private_sets(&self) -> Result<Vec<PrivateSet>, ConfigError> {
        if self.sets.len() < 2 {
            return Err(ConfigError::TooFewSets(self.sets.len()));
        }
        self.sets
            .iter()
            .enumerate()
            .map(|(index, s)| {
                PrivateSet::new(self.q, s.iter().copied()).map_err(|source| ConfigError::Set { index, source })
            })
            .collect()
    }

    pub fn strategy(&self) -> AdversaryStrategy {
        match self.adversary {
            AdversaryKind::None => AdversaryStrategy::None,
            AdversaryKind::InterceptResend => AdversaryStrategy::InterceptResend { policy: BasisPolicy::Uniform },
            AdversaryKind::EntangleMeasure => AdversaryStrategy::EntangleMeasure { f: self.f },
        }
    }

    pub fn protocol_config(&self) -> ProtocolConfig {
        ProtocolConfig {
            delta: Some(self.delta),
            test_fraction: self.test_fraction,
            error_threshold: self.error_threshold,
            decoys_per_message: self.decoys_per_message,
            adversary: self.strategy(),
            ..ProtocolConfig::default()
        }
    }
}

/// One set as a JSON array of integers, e.g. `[1,2,3]`.
pub fn parse_set(input: &str) -> Result<Vec<u64>, ConfigError> {
    serde_json::from_str(input).map_err(|e| ConfigError::InvalidSet { input: input.to_string(), reason: e.to_string() })
}

/// A JSON file holding an array of sets, e.g. `[[1,2,3],[1,2,4]]`.
pub fn load_sets_file(path: &Path) -> Result<Vec<Vec<u64>>, ConfigError> {
    let err = |reason: String| ConfigError::SetsFile { path: path.display().to_string(), reason };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| err(e.to_string()))
}

/// Accepts `0.125` or `1/8`.
pub fn parse_fraction(name: &'static str, input: &str, allow_zero: bool) -> Result<f64, ConfigError> {
    let range = if allow_zero { "[0, 1)" } else { "(0, 1)" };
    let bad = || ConfigError::Fraction { name, range, input: input.to_string() };
    let value = if input.contains('/') {
        let r: Ratio<u64> = input.trim().parse().map_err(|_| bad())?;
        *r.numer() as f64 / *r.denom() as f64
    } else {
        input.trim().parse::<f64>().map_err(|_| bad())?
    };
    let low_ok = if allow_zero { value >= 0.0 } else { value > 0.0 };
    if low_ok && value < 1.0 {
        Ok(value)
    } else {
        Err(bad())
    }
}

pub fn parse_truth_table(input: &str) -> Result<[bool; 2], ConfigError> {
    let bits: Vec<&str> = input.split(',').map(str::trim).collect();
    let bit = |s: &str| match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(ConfigError::TruthTable(input.to_string())),
    };
    match bits.as_slice() {
        [a, b] => Ok([bit(a)?, bit(b)?]),
        _ => Err(ConfigError::TruthTable(input.to_string())),
    }
}

/// `--seed` wins, then `QPSI_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64, ConfigError> {
    match (flag, env) {
        (Some(s), _) => Ok(s),
        (None, Some(v)) => v.trim().parse().map_err(|_| ConfigError::Seed(v.to_string())),
        (None, None) => Ok(0),
    }
}
