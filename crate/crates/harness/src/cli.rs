//! `qpsi` command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 protocol
//! abort (eavesdropping or dishonest third party), 4 result mismatch.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qpsi_core::channel::ChannelError;
use qpsi_core::encoding::PrivateSet;
use qpsi_core::engine::{EngineError, ProtocolResult};
use qpsi_core::StateError;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{
    load_sets_file, parse_fraction, parse_set, parse_truth_table, resolve_seed, AdversaryKind, ConfigError, RunConfig,
    SEED_ENV,
};
use crate::experiments::{attack_sim, keygen_stats, mixing_check, run_sessions, SessionOutcome};
use crate::oracle::OracleCheck;
use crate::report::{GroupChannels, Report};
use crate::resources::EfficiencyReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ABORT: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "qpsi", version, about = "Quantum private set intersection/union cardinality simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the protocol on the given sets and compare with the classical result.
    Run(CommonArgs),
    /// Sample the three-party key source with both users in Z, then in X.
    KeygenStats(CommonArgs),
    /// Check that pad-averaged encrypted basis states are maximally mixed.
    MixingCheck(CommonArgs),
    /// Send bare decoys through an eavesdropper and compare with exact rates.
    AttackSim(CommonArgs),
    /// Count core qubits on an honest run and compare η with its closed form.
    Efficiency(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Modulus; set elements live in [0, q-1].
    #[arg(long)]
    pub q: Option<u64>,
    /// One JSON array per party, e.g. --sets "[1,2,3]" "[1,2,4]".
    #[arg(long, num_args = 1.., action = clap::ArgAction::Append)]
    pub sets: Vec<String>,
    /// JSON file holding an array of sets.
    #[arg(long, conflicts_with = "sets")]
    pub sets_file: Option<PathBuf>,
    /// Extra key generation rounds on top of 4q (default 28q+64).
    #[arg(long)]
    pub delta: Option<usize>,
    /// Share of key generation rounds spent on the honesty test.
    #[arg(long, default_value = "1/8")]
    pub test_fraction: String,
    /// Largest tolerated decoy or test error rate.
    #[arg(long, default_value = "0")]
    pub threshold: String,
    #[arg(long, value_enum, default_value = "none")]
    pub adversary: AdversaryKind,
    /// Truth table f(0),f(1) of the entangle-measure unitary.
    #[arg(long, default_value = "0,1")]
    pub f: String,
    /// Decoys per quantum message (default: one per payload qubit).
    #[arg(long)]
    pub decoys_per_message: Option<usize>,
    /// Master seed; falls back to QPSI_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sessions for `run`, samples for `keygen-stats` and `attack-sim`.
    #[arg(long)]
    pub shots: Option<usize>,
    /// Worker threads for multi-session runs.
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
    /// Party count for `efficiency` when no sets are given.
    #[arg(long)]
    pub parties: Option<usize>,
    /// Also write the JSON report to this path.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Record wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(EngineError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Engine(_) => EXIT_CONFIG,
            CliError::State(_) | CliError::Channel(_) | CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::State(s) => CliError::State(s),
            EngineError::Channel(c) => CliError::Channel(c),
            other => CliError::Engine(other),
        }
    }
}

/// A finished command: its report, a short text summary and the exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub summary: Vec<String>,
    pub exit_code: i32,
}

impl CommonArgs {
    fn seed(&self, env_seed: Option<&str>) -> Result<u64, ConfigError> {
        resolve_seed(self.seed, env_seed)
    }

    fn raw_sets(&self) -> Result<Vec<Vec<u64>>, ConfigError> {
        match &self.sets_file {
            Some(path) => load_sets_file(path),
            None => self.sets.iter().map(|s| parse_set(s)).collect(),
        }
    }

    fn run_config(
        &self,
        env_seed: Option<&str>,
        sets: Vec<Vec<u64>>,
        default_shots: usize,
    ) -> Result<RunConfig, ConfigError> {
        let q = self.q.ok_or(ConfigError::MissingModulus)?;
        let mut cfg = RunConfig::new(q, sets);
        if let Some(d) = self.delta {
            cfg.delta = d;
        }
        cfg.test_fraction = parse_fraction("--test-fraction", &self.test_fraction, false)?;
        cfg.error_threshold = parse_fraction("--threshold", &self.threshold, true)?;
        cfg.adversary = self.adversary;
        cfg.f = parse_truth_table(&self.f)?;
        cfg.decoys_per_message = self.decoys_per_message;
        cfg.seed = self.seed(env_seed)?;
        cfg.shots = self.shots.unwrap_or(default_shots);
        cfg.parallel = self.parallel;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn config_value(command: &str, cfg: &impl Serialize) -> Value {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    v.as_object_mut().expect("config is an object").insert("command".into(), json!(command));
    v
}

fn masked_lists(r: &ProtocolResult) -> Vec<Vec<u64>> {
    r.masked_sets.iter().map(|m| m.elements().iter().copied().collect()).collect()
}

#[derive(Debug, Serialize)]
struct Repeat {
    stream: usize,
    intersection_cardinality: Option<usize>,
    union_cardinality: Option<usize>,
    oracle_agrees: Option<bool>,
    aborted: bool,
}

fn repeat_summary(stream: usize, outcome: &SessionOutcome, sets: &[PrivateSet]) -> Repeat {
    match outcome {
        Ok(r) => Repeat {
            stream,
            intersection_cardinality: Some(r.intersection_cardinality),
            union_cardinality: Some(r.union_cardinality),
            oracle_agrees: Some(OracleCheck::compare(sets, r.intersection_cardinality, r.union_cardinality).agrees),
            aborted: false,
        },
        Err(_) => Repeat {
            stream,
            intersection_cardinality: None,
            union_cardinality: None,
            oracle_agrees: None,
            aborted: true,
        },
    }
}

/// Fills every protocol section of `report` from a completed session.
fn protocol_sections(report: &mut Report, r: &ProtocolResult, sets: &[PrivateSet]) -> (OracleCheck, EfficiencyReport) {
    let oracle = OracleCheck::compare(sets, r.intersection_cardinality, r.union_cardinality);
    let efficiency = EfficiencyReport::new(r.q, r.parties as u64, &r.resources);
    report.counts = Some(r.counts.clone());
    report.keygen_report = Some(r.groups.iter().map(|g| g.keygen.clone()).collect());
    report.channel_reports = Some(r.groups.iter().enumerate().map(|(i, g)| GroupChannels::from_group(i, g)).collect());
    report.resources = Some(r.resources);
    report.efficiency = Some(efficiency.clone());
    report.oracle = Some(oracle);
    (oracle, efficiency)
}

fn run_command(name: &str, cfg: &RunConfig, sets: &[PrivateSet], check_efficiency: bool) -> Result<Outcome, CliError> {
    let outcomes = run_sessions(sets, &cfg.protocol_config(), cfg.seed, cfg.shots, cfg.parallel)?;
    let repeats: Vec<Repeat> = if outcomes.len() > 1 {
        outcomes.iter().enumerate().map(|(i, o)| repeat_summary(i, o, sets)).collect()
    } else {
        Vec::new()
    };
    let any_abort = outcomes.iter().any(|o| o.is_err());
    let any_disagree = repeats.iter().any(|r| r.oracle_agrees == Some(false));

    match &outcomes[0] {
        Err(abort) => {
            let result = json!({ "aborted": abort, "repeats": repeats });
            let mut report = Report::new(config_value(name, cfg), result);
            report.keygen_report = abort.keygen_report.clone().map(|k| vec![k]);
            let summary = vec![format!("aborted: {:?} in {:?} (group {})", abort.reason, abort.phase, abort.group)];
            Ok(Outcome { report, summary, exit_code: EXIT_ABORT })
        }
        Ok(r) => {
            let result = json!({
                "parties": r.parties,
                "q": r.q,
                "intersection_cardinality": r.intersection_cardinality,
                "union_cardinality": r.union_cardinality,
                "multiplier": r.multiplier,
                "masked_sets": masked_lists(r),
                "xor_mismatches": r.xor_mismatches(),
                "transcript": r.transcript,
                "repeats": repeats,
            });
            let mut report = Report::new(config_value(name, cfg), result);
            let (oracle, efficiency) = protocol_sections(&mut report, r, sets);
            let summary = vec![
                format!("intersection cardinality: {}", r.intersection_cardinality),
                format!("union cardinality: {}", r.union_cardinality),
                format!("oracle agrees: {}", oracle.agrees),
                format!(
                    "core qubits: {} (expected {}), efficiency {} (formula {})",
                    efficiency.counted_core_qubits,
                    efficiency.expected_core_qubits,
                    efficiency.measured,
                    efficiency.formula
                ),
            ];
            let exit_code = if any_abort {
                EXIT_ABORT
            } else if !oracle.agrees || any_disagree || (check_efficiency && !efficiency.matches) {
                EXIT_MISMATCH
            } else {
                EXIT_OK
            };
            Ok(Outcome { report, summary, exit_code })
        }
    }
}

#[derive(Debug, Serialize)]
struct SeedOnly {
    seed: u64,
    shots: usize,
}

fn execute_inner(command: &Command, env_seed: Option<&str>) -> Result<Outcome, CliError> {
    match command {
        Command::Run(args) => {
            let cfg = args.run_config(env_seed, args.raw_sets()?, 1)?;
            let sets = cfg.private_sets()?;
            run_command("run", &cfg, &sets, false)
        }
        Command::Efficiency(args) => {
            let mut raw = args.raw_sets()?;
            if raw.is_empty() {
                let m = args.parties.unwrap_or(2);
                if m < 2 {
                    return Err(ConfigError::Parties(m).into());
                }
                raw = vec![Vec::new(); m];
            }
            let cfg = args.run_config(env_seed, raw, 1)?;
            let sets = cfg.private_sets()?;
            run_command("efficiency", &cfg, &sets, true)
        }
        Command::KeygenStats(args) => {
            let echo = SeedOnly { seed: args.seed(env_seed)?, shots: args.shots.unwrap_or(2048) };
            if echo.shots == 0 {
                return Err(ConfigError::Shots.into());
            }
            let stats = keygen_stats(echo.shots, echo.seed)?;
            let violations = stats.zz.violations + stats.xx.violations;
            let summary = vec![
                format!("shots per basis: {}", stats.shots),
                format!("Z/Z parity violations: {}", stats.zz.violations),
                format!("X/X agreement violations: {}", stats.xx.violations),
                format!("marginals uniform at alpha=0.001: {}", stats.marginals_uniform()),
            ];
            let exit_code = if violations == 0 { EXIT_OK } else { EXIT_MISMATCH };
            let report = Report::new(config_value("keygen-stats", &echo), serde_json::to_value(&stats).expect("stats"));
            Ok(Outcome { report, summary, exit_code })
        }
        Command::MixingCheck(args) => {
            let echo = SeedOnly { seed: args.seed(env_seed)?, shots: 1 };
            let mixing = mixing_check()?;
            let worst = mixing.states.iter().map(|s| s.max_deviation).fold(0.0, f64::max);
            let summary = vec![format!("max deviation from I/4: {worst:e}"), format!("passed: {}", mixing.passed)];
            let exit_code = if mixing.passed { EXIT_OK } else { EXIT_MISMATCH };
            let report =
                Report::new(config_value("mixing-check", &echo), serde_json::to_value(&mixing).expect("mixing"));
            Ok(Outcome { report, summary, exit_code })
        }
        Command::AttackSim(args) => {
            #[derive(Serialize)]
            struct AttackEcho {
                seed: u64,
                shots: usize,
                adversary: AdversaryKind,
                f: [bool; 2],
            }
            let echo = AttackEcho {
                seed: args.seed(env_seed)?,
                shots: args.shots.unwrap_or(4096),
                adversary: args.adversary,
                f: parse_truth_table(&args.f)?,
            };
            if echo.shots == 0 {
                return Err(ConfigError::Shots.into());
            }
            let strategy =
                RunConfig { adversary: echo.adversary, f: echo.f, ..RunConfig::new(2, Vec::new()) }.strategy();
            let attack = attack_sim(strategy, echo.shots, echo.seed)?;
            let mut summary = vec![
                format!(
                    "decoys: {}, wrong: {}, sampled rate: {:.4}",
                    attack.sampled.decoys_tested, attack.sampled.decoys_wrong, attack.sampled.error_rate
                ),
                format!("exact detection probability: {}", attack.detection_probability),
                format!("X-basis detection probability: {}", attack.x_basis_detection),
            ];
            if let Some(r) = attack.detection_probability_exact {
                summary.push(format!("exact detection probability (rational): {r}"));
            }
            if let Some(g) = attack.information_gain {
                summary.push(format!("ancilla information gain (trace distance): {g:e}"));
            }
            let report = Report::new(config_value("attack-sim", &echo), serde_json::to_value(&attack).expect("attack"));
            Ok(Outcome { report, summary, exit_code: EXIT_OK })
        }
    }
}

/// Runs a parsed command. `env_seed` is the value of `QPSI_SEED`, if any.
pub fn execute(cli: &Cli, env_seed: Option<&str>) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let mut outcome = execute_inner(&cli.command, env_seed)?;
    let args = common(&cli.command);
    if args.timing {
        outcome.report.timing_ms = Some(started.elapsed().as_millis() as u64);
    }
    Ok(outcome)
}

fn common(command: &Command) -> &CommonArgs {
    match command {
        Command::Run(a)
        | Command::KeygenStats(a)
        | Command::MixingCheck(a)
        | Command::AttackSim(a)
        | Command::Efficiency(a) => a,
    }
}

/// Parses `args`, runs, writes the report and returns the exit code.
pub fn main_with<I, T>(args: I, env_seed: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = match execute(&cli, env_seed) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let json = outcome.report.to_json();
    let args = common(&cli.command);
    if let Some(path) = &args.report {
        if let Err(source) = std::fs::write(path, &json) {
            eprintln!("error: {}", CliError::Io { path: path.display().to_string(), source });
            return EXIT_IO;
        }
    }
    match args.format {
        Format::Json => print!("{json}"),
        Format::Text => outcome.summary.iter().for_each(|line| println!("{line}")),
    }
    outcome.exit_code
}

pub fn main_from_env() -> i32 {
    let env_seed = std::env::var(SEED_ENV).ok();
    main_with(std::env::args_os(), env_seed.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("qpsi").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn repeated_sets_flag() {
        let cli = parse(&["run", "--q", "5", "--sets", "[1,2,3]", "[1,2,4]", "--seed", "7"]);
        let Command::Run(a) = &cli.command else { panic!() };
        assert_eq!(a.sets, ["[1,2,3]", "[1,2,4]"]);
        let cli = parse(&["run", "--q", "5", "--sets", "[1]", "--sets", "[2]"]);
        let Command::Run(a) = &cli.command else { panic!() };
        assert_eq!(a.sets.len(), 2);
    }

    #[test]
    fn run_worked_example() {
        let cli = parse(&["run", "--q", "5", "--sets", "[1,2,3]", "[1,2,4]", "--seed", "7"]);
        let out = execute(&cli, None).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
        assert_eq!(out.report.result["intersection_cardinality"], 2);
        assert_eq!(out.report.result["union_cardinality"], 4);
        assert!(out.report.oracle.unwrap().agrees);
    }

    #[test]
    fn config_errors_map_to_two() {
        for args in [
            &["run", "--sets", "[1]", "[2]"][..],
            &["run", "--q", "5", "--sets", "[1]"],
            &["run", "--q", "5", "--sets", "[9]", "[1]"],
            &["run", "--q", "5", "--sets", "[1]", "[2]", "--test-fraction", "2"],
            &["run", "--q", "5", "--sets", "[1]", "[2]", "--f", "3"],
        ] {
            let err = execute(&parse(args), None).unwrap_err();
            assert_eq!(err.exit_code(), EXIT_CONFIG, "{args:?}");
        }
        assert_eq!(main_with(["qpsi", "run", "--bogus"], None), EXIT_CONFIG);
    }

    #[test]
    fn intercept_resend_aborts() {
        let cli = parse(&["run", "--q", "5", "--sets", "[1]", "[2]", "--adversary", "intercept-resend"]);
        let out = execute(&cli, None).unwrap();
        assert_eq!(out.exit_code, EXIT_ABORT);
        assert!(out.report.result["aborted"].is_object());
    }

    #[test]
    fn env_seed_fallback() {
        let cli = parse(&["run", "--q", "5", "--sets", "[1,2]", "[2,3]"]);
        let a = execute(&cli, Some("42")).unwrap().report.to_json();
        let b = execute(&parse(&["run", "--q", "5", "--sets", "[1,2]", "[2,3]", "--seed", "42"]), None)
            .unwrap()
            .report
            .to_json();
        assert_eq!(a, b);
    }
}
