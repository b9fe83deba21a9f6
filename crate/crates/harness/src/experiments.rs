//! Drivers behind the CLI commands. Each returns a serializable summary.

use std::collections::BTreeMap;

use num_rational::Ratio;
use qpsi_core::channel::{
    entangle_measure_detection_for, entangle_measure_information_gain, intercept_resend_detection_exact,
    intercept_resend_detection_for, send_with_decoys, Adversary, AdversaryStrategy, BasisPolicy, ChannelReport,
    DecoyState,
};
use qpsi_core::density::{average_density, DensityMatrix};
use qpsi_core::encoding::PrivateSet;
use qpsi_core::engine::{run_multi_party, run_two_party, EngineError, ProtocolAbort, ProtocolConfig, ProtocolResult};
use qpsi_core::keygen::{sample_fixed_bases, KeygenRound};
use qpsi_core::pool::QubitPool;
use qpsi_core::qotp::KeyPair2;
use qpsi_core::state::{Basis, StateVector, TOLERANCE};
use qpsi_core::StateError;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::stats::{chi_square_uniform, ChiSquareTest};

/// Independent stream `index` under `seed`; stream 0 is the plain seed.
pub fn session_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub type SessionOutcome = Result<ProtocolResult, Box<ProtocolAbort>>;

/// Runs one session: two-party for two sets, grouped otherwise.
pub fn run_session(
    sets: &[PrivateSet],
    config: &ProtocolConfig,
    seed: u64,
    index: u64,
) -> Result<SessionOutcome, EngineError> {
    let mut rng = session_rng(seed, index);
    let out = match sets {
        [a, b] => run_two_party(a, b, config, &mut rng),
        _ => run_multi_party(sets, config, &mut rng),
    };
    match out {
        Ok(r) => Ok(Ok(r)),
        Err(EngineError::Abort(a)) => Ok(Err(a)),
        Err(e) => Err(e),
    }
}

/// `shots` sessions on streams `0..shots`, spread over `threads` workers.
/// Results come back in stream order whatever the thread count.
pub fn run_sessions(
    sets: &[PrivateSet],
    config: &ProtocolConfig,
    seed: u64,
    shots: usize,
    threads: usize,
) -> Result<Vec<SessionOutcome>, EngineError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
    pool.install(|| (0..shots as u64).into_par_iter().map(|i| run_session(sets, config, seed, i)).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct Marginals {
    pub alice: ChiSquareTest,
    pub bob: ChiSquareTest,
    pub tp: ChiSquareTest,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisExperiment {
    pub alice_basis: char,
    pub bob_basis: char,
    /// Keys are `"<alice><bob> <tp>"`, e.g. `"01 1"`.
    pub histogram: BTreeMap<String, usize>,
    /// Z/Z: `tp ≠ alice ⊕ bob`. X/X: `alice ≠ bob`.
    pub violations: usize,
    pub marginals: Marginals,
}

#[derive(Debug, Clone, Serialize)]
pub struct KeygenStats {
    pub shots: usize,
    pub zz: BasisExperiment,
    pub xx: BasisExperiment,
}

impl KeygenStats {
    pub fn marginals_uniform(&self) -> bool {
        [&self.zz, &self.xx].iter().all(|e| e.marginals.alice.passed && e.marginals.bob.passed && e.marginals.tp.passed)
    }

    pub fn passed(&self) -> bool {
        self.zz.violations == 0 && self.xx.violations == 0 && self.marginals_uniform()
    }
}

fn basis_experiment(rounds: &[KeygenRound]) -> BasisExperiment {
    let (ab, bb) = (rounds[0].alice_basis, rounds[0].bob_basis);
    let mut histogram = BTreeMap::new();
    let mut ones = [0u64; 3];
    let mut violations = 0;
    for r in rounds {
        let (a, b, t) = (r.alice_outcome.unwrap(), r.bob_outcome.unwrap(), r.tp_outcome.unwrap());
        let key = format!("{}{} {}", ab.label(a), bb.label(b), Basis::Z.label(t));
        *histogram.entry(key).or_insert(0) += 1;
        for (slot, bit) in [a, b, t].into_iter().enumerate() {
            ones[slot] += bit as u64;
        }
        let bad = match (ab, bb) {
            (Basis::Z, Basis::Z) => t != a ^ b,
            (Basis::X, Basis::X) => a != b,
            _ => false,
        };
        violations += bad as usize;
    }
    let n = rounds.len() as u64;
    let fit = |k: u64| chi_square_uniform(&[n - k, k]);
    BasisExperiment {
        alice_basis: if ab == Basis::Z { 'Z' } else { 'X' },
        bob_basis: if bb == Basis::Z { 'Z' } else { 'X' },
        histogram,
        violations,
        marginals: Marginals { alice: fit(ones[0]), bob: fit(ones[1]), tp: fit(ones[2]) },
    }
}

/// Measures `shots` fresh `|Ψ⟩` copies with both users in Z, then `shots`
/// more with both in X.
pub fn keygen_stats(shots: usize, seed: u64) -> Result<KeygenStats, StateError> {
    let zz = sample_fixed_bases(shots, Basis::Z, Basis::Z, &mut session_rng(seed, 0))?;
    let xx = sample_fixed_bases(shots, Basis::X, Basis::X, &mut session_rng(seed, 1))?;
    Ok(KeygenStats { shots, zz: basis_experiment(&zz), xx: basis_experiment(&xx) })
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingEntry {
    pub plaintext: String,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingReport {
    pub tolerance: f64,
    pub states: Vec<MixingEntry>,
    pub passed: bool,
}

/// Averages each encrypted two-qubit basis state over the four X pads with
/// weight 1/4 and compares with `I/4`.
pub fn mixing_check() -> Result<MixingReport, StateError> {
    let target = DensityMatrix::maximally_mixed(4);
    let states = (0..4u8)
        .map(|n| {
            let bits = [n & 2 != 0, n & 1 != 0];
            let plain = StateVector::from_bits(&bits)?;
            let mixture: Vec<(f64, StateVector)> = (0..4u8)
                .map(|k| {
                    let key = KeyPair2::new(k & 2 != 0, k & 1 != 0);
                    let enc = qpsi_core::qotp::encrypt(&plain, &key.as_pauli(), &[0, 1]).expect("two keys, two wires");
                    (0.25, enc)
                })
                .collect();
            let max_deviation = average_density(&mixture)?.max_deviation(&target);
            Ok(MixingEntry {
                plaintext: format!("{}{}", bits[0] as u8, bits[1] as u8),
                max_deviation,
                passed: max_deviation < TOLERANCE,
            })
        })
        .collect::<Result<Vec<_>, StateError>>()?;
    let passed = states.iter().all(|s| s.passed);
    Ok(MixingReport { tolerance: TOLERANCE, states, passed })
}

#[derive(Debug, Clone, Serialize)]
pub struct DecoyDetection {
    pub decoy: char,
    pub probability: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    pub strategy: AdversaryStrategy,
    pub sampled: ChannelReport,
    /// Exact per-decoy detection probability averaged over the four decoy states.
    pub detection_probability: f64,
    /// Same value in exact arithmetic, where available.
    pub detection_probability_exact: Option<Ratio<u64>>,
    pub per_decoy: Vec<DecoyDetection>,
    /// Detection probability averaged over `|+⟩` and `|−⟩` only.
    pub x_basis_detection: f64,
    /// Largest trace distance between the eavesdropper's ancilla states.
    pub information_gain: Option<f64>,
}

fn detection_for(strategy: AdversaryStrategy, d: DecoyState) -> f64 {
    match strategy {
        AdversaryStrategy::None => 0.0,
        AdversaryStrategy::InterceptResend { policy } => match policy {
            BasisPolicy::Fixed(b) => intercept_resend_detection_for(d, b),
            BasisPolicy::Uniform => {
                (intercept_resend_detection_for(d, Basis::Z) + intercept_resend_detection_for(d, Basis::X)) / 2.0
            }
        },
        AdversaryStrategy::EntangleMeasure { f } => entangle_measure_detection_for(d, f),
    }
}

/// Sends `decoys` bare decoys through `strategy` and checks them, next to
/// the exact enumerated detection probabilities.
pub fn attack_sim(
    strategy: AdversaryStrategy,
    decoys: usize,
    seed: u64,
) -> Result<AttackReport, qpsi_core::channel::ChannelError> {
    let mut rng = session_rng(seed, 0);
    let mut pool = QubitPool::new();
    let mut adversary = Adversary::new(strategy);
    let (_, sampled) = send_with_decoys(&mut pool, &[], decoys, &mut adversary, &mut rng)?;
    let per_decoy: Vec<DecoyDetection> = DecoyState::ALL
        .iter()
        .map(|&d| DecoyDetection { decoy: d.label(), probability: detection_for(strategy, d) })
        .collect();
    let detection_probability = per_decoy.iter().map(|d| d.probability).sum::<f64>() / 4.0;
    let x_basis_detection = (per_decoy[2].probability + per_decoy[3].probability) / 2.0;
    let (detection_probability_exact, information_gain) = match strategy {
        AdversaryStrategy::None => (Some(Ratio::from_integer(0)), None),
        AdversaryStrategy::InterceptResend { policy: BasisPolicy::Uniform } => {
            (Some(intercept_resend_detection_exact()), None)
        }
        AdversaryStrategy::InterceptResend { .. } => (None, None),
        AdversaryStrategy::EntangleMeasure { f } => (None, Some(entangle_measure_information_gain(f))),
    };
    Ok(AttackReport {
        strategy,
        sampled,
        detection_probability,
        detection_probability_exact,
        per_decoy,
        x_basis_detection,
        information_gain,
    })
}
