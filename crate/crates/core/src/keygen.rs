//! Key generation by quantum secret sharing.
//!
//! The third party (TP) prepares `4q + δ` copies of
//! `|Ψ⟩ = ½ Σ_{a,b} |a⊕b⟩|a⟩|b⟩`, keeps qubit 0 and sends qubits 1 and 2 to
//! Alice and Bob behind decoys. Both users measure in a random basis. On
//! rounds where everyone used Z, TP's bit is the XOR of theirs, so TP learns
//! `r_A ⊕ r_B` and nothing else. X/X rounds always agree and are used,
//! together with Z/Z rounds, to test that TP really prepared `|Ψ⟩`.

use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{send_with_decoys, Adversary, ChannelError, ChannelReport};
use crate::encoding::Side;
use crate::error::StateError;
use crate::pool::{QubitId, QubitPool};
use crate::qotp::KeyPair2;
use crate::state::{Basis, Gate, StateVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeygenConfig {
    /// Key length is `4q` bits per party.
    pub q: usize,
    /// Extra rounds on top of `4q`.
    pub delta: usize,
    /// Fraction of rounds sacrificed to the honesty test, in `(0, 1)`.
    pub test_fraction: f64,
    /// Largest tolerated error rate, in `[0, 1)`, for decoys and for the test.
    pub error_threshold: f64,
    /// Decoys per transmitted sequence; `None` means one per payload qubit.
    pub decoys_per_message: Option<usize>,
}

impl KeygenConfig {
    pub fn new(q: usize) -> Self {
        KeygenConfig {
            q,
            delta: Self::default_delta(q),
            test_fraction: 0.125,
            error_threshold: 0.0,
            decoys_per_message: None,
        }
    }

    /// `28q + 64`: with uniform bases about 7/32 of all rounds end up as
    /// untested Z/Z rounds, which keeps the expected yield near `7q` key bits
    /// against the `4q` needed.
    pub fn default_delta(q: usize) -> usize {
        28 * q + 64
    }

    pub fn rounds(&self) -> usize {
        4 * self.q + self.delta
    }

    pub fn key_bits(&self) -> usize {
        4 * self.q
    }

    pub fn decoys(&self) -> usize {
        self.decoys_per_message.unwrap_or(self.rounds())
    }

    pub fn test_rounds(&self) -> usize {
        let r = self.rounds();
        (libm::ceil(r as f64 * self.test_fraction) as usize).min(r)
    }

    pub fn validate(&self) -> Result<(), KeygenError> {
        if self.q == 0 {
            return Err(KeygenError::Config("q must be positive"));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(KeygenError::Config("test fraction must lie in (0, 1)"));
        }
        if !(0.0..1.0).contains(&self.error_threshold) {
            return Err(KeygenError::Config("error threshold must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// What TP actually sends out.
#[derive(Debug, Clone, PartialEq)]
pub enum TpBehavior {
    Honest,
    /// Replace `|Ψ⟩` by an arbitrary 3-qubit state.
    Substitute(StateVector),
}

/// `|Ψ⟩` via `H(0) H(1) CNOT(0→2) CNOT(1→2)` on `|000⟩`.
pub fn prepare_psi() -> StateVector {
    let mut s = StateVector::zero(3).expect("three qubits");
    for g in [Gate::h(0), Gate::h(1), Gate::cnot(0, 2), Gate::cnot(1, 2)] {
        s.apply(g).expect("valid gate");
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeygenRound {
    pub round_id: usize,
    /// TP always measures in Z.
    pub tp_basis: Basis,
    pub alice_basis: Basis,
    pub bob_basis: Basis,
    pub tp_outcome: Option<bool>,
    pub alice_outcome: Option<bool>,
    pub bob_outcome: Option<bool>,
    pub used_as_test: bool,
}

impl KeygenRound {
    fn same_basis(&self) -> Option<Basis> {
        (self.alice_basis == self.bob_basis).then_some(self.alice_basis)
    }

    /// Table case 1–4 for same-basis rounds: (Z,Z,0), (Z,Z,1), (X,X,0), (X,X,1).
    pub fn case(&self) -> Option<usize> {
        let basis = self.same_basis()?;
        let tp = self.tp_outcome?;
        Some(match basis {
            Basis::Z => 1 + usize::from(tp),
            Basis::X => 3 + usize::from(tp),
        })
    }
}

/// Checks a same-basis round against the expected correlations:
/// Z/Z needs `alice ⊕ bob = tp`, X/X needs `alice = bob`.
pub fn verify_table1(round: &KeygenRound) -> Result<bool, KeygenError> {
    let basis = round.same_basis().ok_or(KeygenError::MixedBasis(round.round_id))?;
    let (Some(tp), Some(a), Some(b)) = (round.tp_outcome, round.alice_outcome, round.bob_outcome) else {
        return Err(KeygenError::Unmeasured(round.round_id));
    };
    Ok(match basis {
        Basis::Z => a ^ b == tp,
        Basis::X => a == b,
    })
}

/// TP's share: only the XOR relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TpKeyView {
    r_t: Vec<bool>,
}

impl TpKeyView {
    pub fn r_t(&self) -> &[bool] {
        &self.r_t
    }

    /// `(α^A_j ⊕ α^B_j, β^A_j ⊕ β^B_j)` for item `j`.
    pub fn xor_pair(&self, j: usize) -> KeyPair2 {
        KeyPair2::new(self.r_t[2 * j], self.r_t[2 * j + 1])
    }
}

/// One user's pad.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OwnerPad {
    bits: Vec<bool>,
}

impl OwnerPad {
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `(α_j, β_j)` = bits `2j` and `2j + 1`.
    pub fn pair(&self, j: usize) -> KeyPair2 {
        KeyPair2::new(self.bits[2 * j], self.bits[2 * j + 1])
    }
}

/// The three correlated key strings. Only the projections
/// [`SharedKeyMaterial::tp_view`] and [`SharedKeyMaterial::owner_pad`] leave
/// this type, so TP code can never be handed an individual pad.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedKeyMaterial {
    r_a: Vec<bool>,
    r_b: Vec<bool>,
    r_t: Vec<bool>,
}

impl SharedKeyMaterial {
    pub fn from_pads(r_a: Vec<bool>, r_b: Vec<bool>) -> Self {
        assert_eq!(r_a.len(), r_b.len(), "pads must have equal length");
        let r_t = r_a.iter().zip(&r_b).map(|(a, b)| a ^ b).collect();
        SharedKeyMaterial { r_a, r_b, r_t }
    }

    /// Builds key material from per-item pads, e.g. to pin known keys.
    pub fn from_pairs(a: &[KeyPair2], b: &[KeyPair2]) -> Self {
        let flat = |p: &[KeyPair2]| p.iter().flat_map(|k| [k.alpha, k.beta]).collect::<Vec<_>>();
        Self::from_pads(flat(a), flat(b))
    }

    pub fn len(&self) -> usize {
        self.r_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_t.is_empty()
    }

    pub fn tp_view(&self) -> TpKeyView {
        TpKeyView { r_t: self.r_t.clone() }
    }

    pub fn owner_pad(&self, side: Side) -> OwnerPad {
        OwnerPad {
            bits: match side {
                Side::A => self.r_a.clone(),
                Side::B => self.r_b.clone(),
            },
        }
    }

    /// `r_T = r_A ⊕ r_B` position by position.
    pub fn relation_holds(&self) -> bool {
        self.r_t.iter().zip(self.r_a.iter().zip(&self.r_b)).all(|(t, (a, b))| *t == a ^ b)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseStats {
    pub tested: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeygenReport {
    pub rounds: usize,
    pub alice_channel: Option<ChannelReport>,
    pub bob_channel: Option<ChannelReport>,
    pub test_rounds: usize,
    /// Indexed by case 1–4 minus one.
    pub cases: [CaseStats; 4],
    pub test_error_rate: f64,
    /// Untested rounds where both users measured in Z.
    pub key_rounds: usize,
    pub key_bits: usize,
    pub qubits_prepared: usize,
    pub decoys_prepared: usize,
}

impl KeygenReport {
    fn empty(config: &KeygenConfig) -> Self {
        KeygenReport {
            rounds: config.rounds(),
            alice_channel: None,
            bob_channel: None,
            test_rounds: 0,
            cases: [CaseStats::default(); 4],
            test_error_rate: 0.0,
            key_rounds: 0,
            key_bits: config.key_bits(),
            qubits_prepared: 3 * config.rounds(),
            decoys_prepared: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Link {
    TpToAlice,
    TpToBob,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KeygenError {
    #[error("invalid key generation config: {0}")]
    Config(&'static str),
    #[error("eavesdropping detected on {link:?}: decoy error rate {:.4}", report.error_rate)]
    AbortEavesdropping { link: Link, report: ChannelReport, keygen: alloc::boxed::Box<KeygenReport> },
    #[error("state check failed: error rate {:.4} above threshold", report.test_error_rate)]
    AbortDishonestTp { report: alloc::boxed::Box<KeygenReport> },
    #[error("only {available} key rounds survived, {required} needed; rerun with a larger delta")]
    InsufficientKeyBits { available: usize, required: usize, report: alloc::boxed::Box<KeygenReport> },
    #[error("no same-basis test rounds; the honesty check cannot pass")]
    NoTestRounds,
    #[error("round {0} used different bases")]
    MixedBasis(usize),
    #[error("round {0} is not fully measured")]
    Unmeasured(usize),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone)]
pub struct KeygenOutput {
    pub keys: SharedKeyMaterial,
    pub report: KeygenReport,
    pub rounds: Vec<KeygenRound>,
}

fn random_basis<R: Rng + ?Sized>(rng: &mut R) -> Basis {
    if rng.gen::<bool>() {
        Basis::X
    } else {
        Basis::Z
    }
}

/// Runs the full secret-sharing session inside `pool`, with `adversary` on
/// both TP→user links.
pub fn run_keygen<R: Rng + ?Sized>(
    pool: &mut QubitPool,
    config: &KeygenConfig,
    tp: &TpBehavior,
    adversary: &mut Adversary,
    rng: &mut R,
) -> Result<KeygenOutput, KeygenError> {
    config.validate()?;
    let source = match tp {
        TpBehavior::Honest => prepare_psi(),
        TpBehavior::Substitute(s) if s.num_qubits() == 3 => s.clone(),
        TpBehavior::Substitute(s) => {
            return Err(StateError::DimensionMismatch { expected: 3, found: s.num_qubits() }.into())
        }
    };
    let n = config.rounds();
    let mut report = KeygenReport::empty(config);

    let triples: Vec<Vec<QubitId>> = (0..n).map(|_| pool.alloc(source.clone())).collect();
    let to_alice: Vec<QubitId> = triples.iter().map(|t| t[1]).collect();
    let to_bob: Vec<QubitId> = triples.iter().map(|t| t[2]).collect();

    // decoy check on both links
    let decoys = config.decoys();
    report.decoys_prepared = 2 * decoys;
    let (alice_qubits, alice_report) = send_with_decoys(pool, &to_alice, decoys, adversary, rng)?;
    report.alice_channel = Some(alice_report);
    let (bob_qubits, bob_report) = send_with_decoys(pool, &to_bob, decoys, adversary, rng)?;
    report.bob_channel = Some(bob_report);
    for (link, r) in [(Link::TpToAlice, alice_report), (Link::TpToBob, bob_report)] {
        if r.exceeds(config.error_threshold) {
            return Err(KeygenError::AbortEavesdropping { link, report: r, keygen: report.into() });
        }
    }

    // measurements
    let mut rounds = Vec::with_capacity(n);
    for (round_id, triple) in triples.iter().enumerate() {
        let alice_basis = random_basis(rng);
        let bob_basis = random_basis(rng);
        let tp_outcome = pool.measure(triple[0], Basis::Z, rng)?;
        let alice_outcome = pool.measure(alice_qubits[round_id], alice_basis, rng)?;
        let bob_outcome = pool.measure(bob_qubits[round_id], bob_basis, rng)?;
        rounds.push(KeygenRound {
            round_id,
            tp_basis: Basis::Z,
            alice_basis,
            bob_basis,
            tp_outcome: Some(tp_outcome),
            alice_outcome: Some(alice_outcome),
            bob_outcome: Some(bob_outcome),
            used_as_test: false,
        });
    }

    // honesty test on a random subset; TP reveals her bits there
    let test_rounds = config.test_rounds();
    report.test_rounds = test_rounds;
    for i in index::sample(rng, n, test_rounds) {
        rounds[i].used_as_test = true;
    }
    let mut tested = 0;
    let mut violations = 0;
    for round in rounds.iter().filter(|r| r.used_as_test) {
        let Some(case) = round.case() else { continue };
        let ok = verify_table1(round)?;
        let stats = &mut report.cases[case - 1];
        stats.tested += 1;
        tested += 1;
        if !ok {
            stats.violations += 1;
            violations += 1;
        }
    }
    if tested == 0 {
        return Err(KeygenError::NoTestRounds);
    }
    report.test_error_rate = violations as f64 / tested as f64;
    if report.test_error_rate > config.error_threshold {
        return Err(KeygenError::AbortDishonestTp { report: report.into() });
    }

    // Z-basis announcement and key extraction, ordered by round id
    let key_rounds: Vec<&KeygenRound> =
        rounds.iter().filter(|r| !r.used_as_test && r.alice_basis == Basis::Z && r.bob_basis == Basis::Z).collect();
    report.key_rounds = key_rounds.len();
    let needed = config.key_bits();
    if key_rounds.len() < needed {
        return Err(KeygenError::InsufficientKeyBits {
            available: key_rounds.len(),
            required: needed,
            report: report.into(),
        });
    }
    let take = |f: fn(&KeygenRound) -> Option<bool>| -> Vec<bool> {
        key_rounds[..needed].iter().map(|r| f(r).unwrap_or_default()).collect()
    };
    let r_a = take(|r| r.alice_outcome);
    let r_b = take(|r| r.bob_outcome);
    let r_t = take(|r| r.tp_outcome);
    let keys = SharedKeyMaterial { r_a, r_b, r_t };
    Ok(KeygenOutput { keys, report, rounds })
}

/// Measures fresh `|Ψ⟩` copies with fixed bases, no channel and no test
/// selection. Feeds histogram experiments.
pub fn sample_fixed_bases<R: Rng + ?Sized>(
    shots: usize,
    alice_basis: Basis,
    bob_basis: Basis,
    rng: &mut R,
) -> Result<Vec<KeygenRound>, StateError> {
    let psi = prepare_psi();
    (0..shots)
        .map(|round_id| {
            let (tp, after) = psi.measure(&[0], Basis::Z, rng)?;
            let (a, after) = after.measure(&[1], alice_basis, rng)?;
            let (b, _) = after.measure(&[2], bob_basis, rng)?;
            Ok(KeygenRound {
                round_id,
                tp_basis: Basis::Z,
                alice_basis,
                bob_basis,
                tp_outcome: Some(tp[0]),
                alice_outcome: Some(a[0]),
                bob_outcome: Some(b[0]),
                used_as_test: false,
            })
        })
        .collect()
}

/// Per-round probabilities that a Z/Z round and an X/X round of `state`
/// violate the expected correlations.
pub fn violation_probabilities(state: &StateVector) -> Result<(f64, f64), StateError> {
    let zz = state
        .measurement_distribution(&[0, 1, 2], Basis::Z)?
        .iter()
        .filter(|(o, _)| o[0] != (o[1] ^ o[2]))
        .map(|(_, p)| p)
        .sum();
    let xx =
        state.measurement_distribution(&[1, 2], Basis::X)?.iter().filter(|(o, _)| o[0] != o[1]).map(|(_, p)| p).sum();
    Ok((zz, xx))
}

fn ln_choose(n: usize, k: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    libm::exp(ln_choose(n, k) + k as f64 * libm::log(p) + (n - k) as f64 * libm::log(1.0 - p))
}

/// Exact probability that the honesty test accepts a source whose Z/Z and
/// X/X rounds violate the correlations with probabilities `zz` and `xx`.
///
/// Among the test rounds, the number with matching bases is
/// `Binomial(T, ½)`; each of those is Z/Z or X/X with equal odds, so
/// violations are `Binomial(n, (zz + xx) / 2)`. The test accepts iff `n > 0`
/// and the violation rate is within the threshold.
pub fn acceptance_probability(config: &KeygenConfig, zz: f64, xx: f64) -> f64 {
    let t = config.test_rounds();
    let p = (zz + xx) / 2.0;
    (1..=t)
        .map(|n| {
            let allowed = (0..=n).take_while(|&v| v as f64 <= config.error_threshold * n as f64);
            binomial_pmf(t, n, 0.5) * allowed.map(|v| binomial_pmf(n, v, p)).sum::<f64>()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::AdversaryStrategy;
    use crate::state::TOLERANCE;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn psi_matches_its_bell_expansion() {
        // (|0>(|00>+|11>) + |1>(|01>+|10>)) / 2, qubit 0 most significant
        let mut expected = vec![Complex64::new(0.0, 0.0); 8];
        for idx in [0b000, 0b011, 0b101, 0b110] {
            expected[idx] = Complex64::new(0.5, 0.0);
        }
        let expected = StateVector::from_amplitudes(expected).unwrap();
        assert!(prepare_psi().max_deviation(&expected) < TOLERANCE);
    }

    #[test]
    fn psi_has_even_parity_and_mixed_marginal() {
        let d = prepare_psi().measurement_distribution(&[0, 1, 2], Basis::Z).unwrap();
        assert_eq!(d.len(), 4);
        for (o, p) in &d {
            assert!(!(o[0] ^ o[1] ^ o[2]));
            assert!((p - 0.25).abs() < TOLERANCE);
        }
        let rho = prepare_psi().reduced_density(&[0]).unwrap();
        assert!(rho.max_deviation(&crate::density::DensityMatrix::maximally_mixed(2)) < TOLERANCE);
    }

    #[test]
    fn x_measurements_agree_on_psi() {
        let d = prepare_psi().measurement_distribution(&[1, 2], Basis::X).unwrap();
        let agree: f64 = d.iter().filter(|(o, _)| o[0] == o[1]).map(|(_, p)| p).sum();
        assert!((agree - 1.0).abs() < TOLERANCE);
    }

    fn round(basis: Basis, tp: bool, a: bool, b: bool) -> KeygenRound {
        KeygenRound {
            round_id: 0,
            tp_basis: Basis::Z,
            alice_basis: basis,
            bob_basis: basis,
            tp_outcome: Some(tp),
            alice_outcome: Some(a),
            bob_outcome: Some(b),
            used_as_test: true,
        }
    }

    #[test]
    fn table_checks() {
        assert!(verify_table1(&round(Basis::Z, true, true, false)).unwrap());
        assert!(verify_table1(&round(Basis::X, false, false, false)).unwrap());
        assert!(!verify_table1(&round(Basis::Z, false, false, true)).unwrap());
        let mut mixed = round(Basis::Z, false, false, false);
        mixed.bob_basis = Basis::X;
        assert_eq!(verify_table1(&mixed), Err(KeygenError::MixedBasis(0)));
        let mut open = round(Basis::Z, false, false, false);
        open.bob_outcome = None;
        assert_eq!(verify_table1(&open), Err(KeygenError::Unmeasured(0)));
    }

    #[test]
    fn honest_run_yields_xor_relation() {
        for seed in 0..5 {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut pool = QubitPool::new();
            let cfg = KeygenConfig::new(5);
            let mut eve = Adversary::new(AdversaryStrategy::None);
            let out = run_keygen(&mut pool, &cfg, &TpBehavior::Honest, &mut eve, &mut rng).unwrap();
            assert!(out.keys.relation_holds());
            assert_eq!(out.keys.len(), 20);
            assert_eq!(out.report.test_error_rate, 0.0);
            assert!(out.report.cases.iter().all(|c| c.violations == 0));
            for r in out.rounds.iter().filter(|r| r.alice_basis == Basis::X && r.bob_basis == Basis::X) {
                assert_eq!(r.alice_outcome, r.bob_outcome);
            }
            for r in out.rounds.iter().filter(|r| r.alice_basis == Basis::Z && r.bob_basis == Basis::Z) {
                assert!(verify_table1(r).unwrap());
            }
        }
    }

    #[test]
    fn product_state_substitution_is_caught() {
        let (zz, xx) = violation_probabilities(&StateVector::zero(3).unwrap()).unwrap();
        assert!(zz.abs() < TOLERANCE);
        assert!((xx - 0.5).abs() < TOLERANCE);
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let mut pool = QubitPool::new();
        let mut eve = Adversary::new(AdversaryStrategy::None);
        let tp = TpBehavior::Substitute(StateVector::zero(3).unwrap());
        let err = run_keygen(&mut pool, &KeygenConfig::new(5), &tp, &mut eve, &mut rng).unwrap_err();
        let KeygenError::AbortDishonestTp { report } = err else { panic!("expected abort, got {err:?}") };
        let xx_cases = report.cases[2].violations + report.cases[3].violations;
        assert!(xx_cases > 0);
        assert_eq!(report.cases[0].violations + report.cases[1].violations, 0);
    }

    #[test]
    fn intercept_resend_aborts_keygen() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let mut pool = QubitPool::new();
        let mut eve =
            Adversary::new(AdversaryStrategy::InterceptResend { policy: crate::channel::BasisPolicy::Uniform });
        let err = run_keygen(&mut pool, &KeygenConfig::new(5), &TpBehavior::Honest, &mut eve, &mut rng).unwrap_err();
        assert!(matches!(err, KeygenError::AbortEavesdropping { link: Link::TpToAlice, .. }));
    }

    #[test]
    fn too_few_rounds_reports_insufficient_bits() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let mut pool = QubitPool::new();
        let cfg = KeygenConfig { delta: 0, ..KeygenConfig::new(5) };
        let mut eve = Adversary::new(AdversaryStrategy::None);
        let err = run_keygen(&mut pool, &cfg, &TpBehavior::Honest, &mut eve, &mut rng).unwrap_err();
        assert!(matches!(err, KeygenError::InsufficientKeyBits { required: 20, .. }));
    }

    #[test]
    fn config_validation() {
        let bad = KeygenConfig { test_fraction: 1.0, ..KeygenConfig::new(3) };
        assert!(bad.validate().is_err());
        let bad = KeygenConfig { error_threshold: 1.0, ..KeygenConfig::new(3) };
        assert!(bad.validate().is_err());
        assert!(KeygenConfig::new(0).validate().is_err());
        assert_eq!(KeygenConfig::new(5).rounds(), 20 + 204);
    }

    #[test]
    fn acceptance_probability_edges() {
        let cfg = KeygenConfig::new(5);
        let t = cfg.test_rounds() as i32;
        // honest source: accepted unless no test round had matching bases
        let honest = acceptance_probability(&cfg, 0.0, 0.0);
        assert!((honest - (1.0 - 0.5f64.powi(t))).abs() < 1e-12);
        // zero threshold closed form: (1 - p/2)^T - (1/2)^T
        let p = 0.3;
        let exact = (1.0 - p / 2.0f64).powi(t) - 0.5f64.powi(t);
        assert!((acceptance_probability(&cfg, p, p) - exact).abs() < 1e-12);
    }
}
