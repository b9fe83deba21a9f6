//! Quantum channel with decoy-photon checking and pluggable eavesdroppers.
//!
//! A sender interleaves decoys in `{|0⟩, |1⟩, |+⟩, |−⟩}` at secret positions,
//! keeps the [`DecoyPlan`], and later reveals it so the receiver can measure
//! each decoy in its preparation basis.

use alloc::vec::Vec;

use num_rational::Ratio;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::DensityMatrix;
use crate::error::StateError;
use crate::pool::{QubitId, QubitPool};
use crate::state::{Basis, Gate, StateVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("no decoys were tested; an empty check cannot pass")]
    NoDecoys,
    #[error("decoy plan covers {plan} positions but the message has {message}")]
    PlanMismatch { plan: usize, message: usize },
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DecoyState {
    Zero,
    One,
    Plus,
    Minus,
}

impl DecoyState {
    pub const ALL: [DecoyState; 4] = [DecoyState::Zero, DecoyState::One, DecoyState::Plus, DecoyState::Minus];

    pub fn basis(self) -> Basis {
        match self {
            DecoyState::Zero | DecoyState::One => Basis::Z,
            DecoyState::Plus | DecoyState::Minus => Basis::X,
        }
    }

    /// Outcome expected when measuring in [`DecoyState::basis`].
    pub fn bit(self) -> bool {
        matches!(self, DecoyState::One | DecoyState::Minus)
    }

    pub fn label(self) -> char {
        self.basis().label(self.bit())
    }

    pub fn state(self) -> StateVector {
        let mut s = StateVector::from_bits(&[self.bit()]).expect("one qubit");
        if self.basis() == Basis::X {
            s.apply(Gate::h(0)).expect("wire 0");
        }
        s
    }
}

/// Sender-private record of where the decoys sit and what they are.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoyPlan {
    /// Length of the interleaved sequence (payload + decoys).
    pub total_len: usize,
    /// Sorted by position.
    pub decoys: Vec<(usize, DecoyState)>,
}

impl DecoyPlan {
    pub fn payload_len(&self) -> usize {
        self.total_len - self.decoys.len()
    }
}

/// Picks decoy positions uniformly without replacement in the interleaved
/// sequence and a uniform decoy state for each.
pub fn insert_decoys<R: Rng + ?Sized>(payload_len: usize, num_decoys: usize, rng: &mut R) -> DecoyPlan {
    let total_len = payload_len + num_decoys;
    let mut positions = index::sample(rng, total_len, num_decoys).into_vec();
    positions.sort_unstable();
    let decoys = positions.into_iter().map(|p| (p, DecoyState::ALL[rng.gen_range(0..4)])).collect();
    DecoyPlan { total_len, decoys }
}

/// A transmitted sequence: payload qubits with decoys interleaved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumMessage {
    pub sequence: Vec<QubitId>,
}

impl QuantumMessage {
    /// Prepares the decoys of `plan` in `pool` and interleaves them with `payload`.
    pub fn assemble(pool: &mut QubitPool, payload: &[QubitId], plan: &DecoyPlan) -> Result<Self, ChannelError> {
        if plan.payload_len() != payload.len() {
            return Err(ChannelError::PlanMismatch { plan: plan.payload_len(), message: payload.len() });
        }
        let mut sequence = Vec::with_capacity(plan.total_len);
        let mut payload = payload.iter();
        let mut decoys = plan.decoys.iter().peekable();
        for pos in 0..plan.total_len {
            match decoys.peek() {
                Some(&&(p, d)) if p == pos => {
                    decoys.next();
                    sequence.push(pool.alloc_qubit(d.basis(), d.bit()));
                }
                _ => sequence.push(*payload.next().expect("payload length checked")),
            }
        }
        Ok(QuantumMessage { sequence })
    }
}

/// Basis choice of an intercept-resend eavesdropper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisPolicy {
    Uniform,
    Fixed(Basis),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdversaryStrategy {
    None,
    /// Measure every qubit and resend the observed eigenstate.
    InterceptResend {
        policy: BasisPolicy,
    },
    /// Attach a fresh ancilla `|0⟩_E` to each qubit via
    /// `U_f |x⟩|y⟩ = |x⟩|y ⊕ f(x)⟩`, with `f = [f(0), f(1)]`.
    EntangleMeasure {
        f: [bool; 2],
    },
}

/// An eavesdropper sitting on every link of a session. Ancillas it attaches
/// stay in its own list so information gain can be computed afterwards.
#[derive(Debug, Clone)]
pub struct Adversary {
    strategy: AdversaryStrategy,
    /// `(attacked qubit, ancilla)` pairs.
    ancillas: Vec<(QubitId, QubitId)>,
    intercepted: usize,
}

impl Adversary {
    pub fn new(strategy: AdversaryStrategy) -> Self {
        Adversary { strategy, ancillas: Vec::new(), intercepted: 0 }
    }

    pub fn strategy(&self) -> AdversaryStrategy {
        self.strategy
    }

    pub fn ancillas(&self) -> &[(QubitId, QubitId)] {
        &self.ancillas
    }

    /// Number of qubits touched so far.
    pub fn intercepted(&self) -> usize {
        self.intercepted
    }

    fn attack<R: Rng + ?Sized>(&mut self, pool: &mut QubitPool, q: QubitId, rng: &mut R) -> Result<(), StateError> {
        match self.strategy {
            AdversaryStrategy::None => return Ok(()),
            AdversaryStrategy::InterceptResend { policy } => {
                let basis = match policy {
                    BasisPolicy::Fixed(b) => b,
                    BasisPolicy::Uniform if rng.gen::<bool>() => Basis::X,
                    BasisPolicy::Uniform => Basis::Z,
                };
                // the post-measurement qubit is exactly the resent eigenstate
                pool.measure(q, basis, rng)?;
            }
            AdversaryStrategy::EntangleMeasure { f } => {
                let ancilla = pool.alloc_qubit(Basis::Z, false);
                apply_uf(pool, f, q, ancilla)?;
                self.ancillas.push((q, ancilla));
            }
        }
        self.intercepted += 1;
        Ok(())
    }
}

fn apply_uf(pool: &mut QubitPool, f: [bool; 2], x: QubitId, y: QubitId) -> Result<(), StateError> {
    if f[0] {
        pool.apply_x(y)?;
    }
    if f[0] != f[1] {
        pool.apply_cnot(x, y)?;
    }
    Ok(())
}

/// Sends `msg` across the channel, letting `adversary` act on every qubit.
pub fn transmit<R: Rng + ?Sized>(
    pool: &mut QubitPool,
    msg: QuantumMessage,
    adversary: &mut Adversary,
    rng: &mut R,
) -> Result<QuantumMessage, ChannelError> {
    for &q in &msg.sequence {
        adversary.attack(pool, q, rng)?;
    }
    Ok(msg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub decoys_tested: usize,
    pub decoys_wrong: usize,
    pub error_rate: f64,
}

impl ChannelReport {
    pub fn exceeds(&self, threshold: f64) -> bool {
        self.error_rate > threshold
    }
}

/// Receiver-side decoy check. Each decoy is measured in its announced basis
/// and compared with its announced state; the payload comes back in its
/// original order with decoys removed.
pub fn verify_decoys<R: Rng + ?Sized>(
    pool: &mut QubitPool,
    msg: &QuantumMessage,
    plan: &DecoyPlan,
    rng: &mut R,
) -> Result<(Vec<QubitId>, ChannelReport), ChannelError> {
    if plan.total_len != msg.sequence.len() {
        return Err(ChannelError::PlanMismatch { plan: plan.total_len, message: msg.sequence.len() });
    }
    if plan.decoys.is_empty() {
        return Err(ChannelError::NoDecoys);
    }
    let mut wrong = 0;
    let mut is_decoy = alloc::vec![false; plan.total_len];
    for &(pos, decoy) in &plan.decoys {
        is_decoy[pos] = true;
        if pool.measure(msg.sequence[pos], decoy.basis(), rng)? != decoy.bit() {
            wrong += 1;
        }
    }
    let payload = msg.sequence.iter().zip(&is_decoy).filter(|(_, &d)| !d).map(|(q, _)| *q).collect();
    let tested = plan.decoys.len();
    Ok((
        payload,
        ChannelReport { decoys_tested: tested, decoys_wrong: wrong, error_rate: wrong as f64 / tested as f64 },
    ))
}

/// Interleaves `decoys` decoys into `payload`, transmits, and runs the
/// receiver-side check. Returns the payload in order and the check report.
pub fn send_with_decoys<R: Rng + ?Sized>(
    pool: &mut QubitPool,
    payload: &[QubitId],
    decoys: usize,
    adversary: &mut Adversary,
    rng: &mut R,
) -> Result<(Vec<QubitId>, ChannelReport), ChannelError> {
    let plan = insert_decoys(payload.len(), decoys, rng);
    let msg = QuantumMessage::assemble(pool, payload, &plan)?;
    let msg = transmit(pool, msg, adversary, rng)?;
    verify_decoys(pool, &msg, &plan, rng)
}

fn eigenstate(basis: Basis, bit: bool) -> StateVector {
    let mut s = StateVector::from_bits(&[bit]).expect("one qubit");
    if basis == Basis::X {
        s.apply(Gate::h(0)).expect("wire 0");
    }
    s
}

fn prob_of(state: &StateVector, wire: usize, basis: Basis, bit: bool) -> f64 {
    state.measurement_distribution(&[wire], basis).expect("valid wire").get(&alloc::vec![bit]).copied().unwrap_or(0.0)
}

/// Exact probability that `decoy` fails its check after an intercept-resend
/// in `eve_basis`, by enumerating the eavesdropper's outcomes.
pub fn intercept_resend_detection_for(decoy: DecoyState, eve_basis: Basis) -> f64 {
    let sent = decoy.state();
    [false, true]
        .iter()
        .map(|&o| prob_of(&sent, 0, eve_basis, o) * prob_of(&eigenstate(eve_basis, o), 0, decoy.basis(), !decoy.bit()))
        .sum()
}

/// Per-decoy detection probability of a uniform-basis intercept-resend,
/// averaged over the four decoy states.
pub fn intercept_resend_detection_probability() -> f64 {
    DecoyState::ALL
        .iter()
        .flat_map(|&d| [Basis::Z, Basis::X].into_iter().map(move |b| intercept_resend_detection_for(d, b)))
        .sum::<f64>()
        / 8.0
}

/// Integer amplitudes of a one-qubit eigenstate over `√2^scale`.
fn exact_eigenstate(basis: Basis, bit: bool) -> ([i64; 2], u32) {
    match (basis, bit) {
        (Basis::Z, false) => ([1, 0], 0),
        (Basis::Z, true) => ([0, 1], 0),
        (Basis::X, false) => ([1, 1], 1),
        (Basis::X, true) => ([1, -1], 1),
    }
}

/// `|⟨a|b⟩|²` for two eigenstates, as an exact rational.
fn exact_overlap(a: (Basis, bool), b: (Basis, bool)) -> Ratio<u64> {
    let (u, ku) = exact_eigenstate(a.0, a.1);
    let (v, kv) = exact_eigenstate(b.0, b.1);
    let dot = u[0] * v[0] + u[1] * v[1];
    Ratio::new((dot * dot) as u64, 1 << (ku + kv))
}

/// [`intercept_resend_detection_probability`] in exact arithmetic: the same
/// enumeration over decoy state, eavesdropper basis and both outcomes.
pub fn intercept_resend_detection_exact() -> Ratio<u64> {
    let weight = Ratio::new(1, 8);
    let mut total = Ratio::from_integer(0);
    for d in DecoyState::ALL {
        for eve in [Basis::Z, Basis::X] {
            for o in [false, true] {
                let caught =
                    exact_overlap((d.basis(), d.bit()), (eve, o)) * exact_overlap((eve, o), (d.basis(), !d.bit()));
                total += weight * caught;
            }
        }
    }
    total
}

fn entangle(decoy: DecoyState, f: [bool; 2]) -> StateVector {
    let mut joint = decoy.state().tensor(&StateVector::zero(1).expect("one qubit"));
    if f[0] {
        joint.apply(Gate::x(1)).expect("wire 1");
    }
    if f[0] != f[1] {
        joint.apply(Gate::cnot(0, 1)).expect("wires 0,1");
    }
    joint
}

/// Exact probability that `decoy` fails its check after `U_f` with a fresh ancilla.
pub fn entangle_measure_detection_for(decoy: DecoyState, f: [bool; 2]) -> f64 {
    prob_of(&entangle(decoy, f), 0, decoy.basis(), !decoy.bit())
}

/// Reduced state of the eavesdropper's ancilla after attacking `decoy`.
pub fn entangle_measure_ancilla(decoy: DecoyState, f: [bool; 2]) -> DensityMatrix {
    entangle(decoy, f).reduced_density(&[1]).expect("wire 1")
}

/// Largest trace distance between ancilla states for any two decoy states.
/// Zero means the eavesdropper learns nothing about which decoy was sent.
pub fn entangle_measure_information_gain(f: [bool; 2]) -> f64 {
    let rhos: Vec<DensityMatrix> = DecoyState::ALL.iter().map(|&d| entangle_measure_ancilla(d, f)).collect();
    let mut worst: f64 = 0.0;
    for (i, a) in rhos.iter().enumerate() {
        for b in &rhos[i + 1..] {
            worst = worst.max(a.trace_distance(b));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::TOLERANCE;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn zero_decoys_is_empty_plan() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let plan = insert_decoys(5, 0, &mut rng);
        assert!(plan.decoys.is_empty());
        assert_eq!(plan.total_len, 5);
    }

    #[test]
    fn seeded_plans_repeat() {
        let a = insert_decoys(4, 4, &mut ChaCha20Rng::seed_from_u64(42));
        let b = insert_decoys(4, 4, &mut ChaCha20Rng::seed_from_u64(42));
        assert_eq!(a, b);
        assert_eq!(a.decoys.len(), 4);
        assert!(a.decoys.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(a.decoys.iter().all(|&(p, _)| p < 8));
    }

    fn payload(pool: &mut QubitPool, n: usize) -> Vec<QubitId> {
        (0..n).map(|i| pool.alloc_qubit(Basis::Z, i % 2 == 1)).collect()
    }

    #[test]
    fn honest_channel_passes_and_preserves_payload() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let mut pool = QubitPool::new();
        let data = payload(&mut pool, 6);
        let before: Vec<StateVector> = data.iter().map(|&q| pool.pure_state(&[q]).unwrap().unwrap()).collect();
        let plan = insert_decoys(6, 6, &mut rng);
        let msg = QuantumMessage::assemble(&mut pool, &data, &plan).unwrap();
        let mut eve = Adversary::new(AdversaryStrategy::None);
        let msg = transmit(&mut pool, msg, &mut eve, &mut rng).unwrap();
        let (out, report) = verify_decoys(&mut pool, &msg, &plan, &mut rng).unwrap();
        assert_eq!(out, data);
        assert_eq!(report.decoys_wrong, 0);
        assert_eq!(report.error_rate, 0.0);
        for (q, s) in out.iter().zip(&before) {
            assert!(pool.pure_state(&[*q]).unwrap().unwrap().max_deviation(s) < TOLERANCE);
        }
    }

    #[test]
    fn empty_check_is_an_error() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let mut pool = QubitPool::new();
        let data = payload(&mut pool, 3);
        let plan = insert_decoys(3, 0, &mut rng);
        let msg = QuantumMessage::assemble(&mut pool, &data, &plan).unwrap();
        assert_eq!(verify_decoys(&mut pool, &msg, &plan, &mut rng).unwrap_err(), ChannelError::NoDecoys);
    }

    #[test]
    fn plan_mismatch() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let mut pool = QubitPool::new();
        let data = payload(&mut pool, 3);
        let plan = insert_decoys(4, 2, &mut rng);
        assert!(matches!(QuantumMessage::assemble(&mut pool, &data, &plan), Err(ChannelError::PlanMismatch { .. })));
        let msg = QuantumMessage { sequence: data };
        assert!(matches!(verify_decoys(&mut pool, &msg, &plan, &mut rng), Err(ChannelError::PlanMismatch { .. })));
    }

    #[test]
    fn intercept_resend_plus_in_z() {
        assert!((intercept_resend_detection_for(DecoyState::Plus, Basis::Z) - 0.5).abs() < TOLERANCE);
        assert!(intercept_resend_detection_for(DecoyState::Plus, Basis::X).abs() < TOLERANCE);
        assert!((intercept_resend_detection_probability() - 0.25).abs() < TOLERANCE);
        assert_eq!(intercept_resend_detection_exact(), Ratio::new(1, 4));
    }

    #[test]
    fn constrained_entangle_measure_is_invisible() {
        for f in [[false, false], [true, true]] {
            for d in DecoyState::ALL {
                assert!(entangle_measure_detection_for(d, f) < TOLERANCE);
            }
            assert!(entangle_measure_information_gain(f) < TOLERANCE);
        }
    }

    #[test]
    fn unconstrained_entangle_measure_disturbs_x_decoys() {
        for f in [[false, true], [true, false]] {
            assert!((entangle_measure_detection_for(DecoyState::Plus, f) - 0.5).abs() < TOLERANCE);
            assert!((entangle_measure_detection_for(DecoyState::Minus, f) - 0.5).abs() < TOLERANCE);
            assert!(entangle_measure_detection_for(DecoyState::Zero, f) < TOLERANCE);
            assert!(entangle_measure_information_gain(f) > 0.5);
        }
    }

    #[test]
    fn adversary_keeps_its_ancillas() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let mut pool = QubitPool::new();
        let data = payload(&mut pool, 4);
        let mut eve = Adversary::new(AdversaryStrategy::EntangleMeasure { f: [false, true] });
        transmit(&mut pool, QuantumMessage { sequence: data.clone() }, &mut eve, &mut rng).unwrap();
        assert_eq!(eve.ancillas().len(), 4);
        assert_eq!(eve.intercepted(), 4);
        // Z-basis payload is copied onto the ancilla
        for (i, &(q, anc)) in eve.ancillas().iter().enumerate() {
            assert_eq!(q, data[i]);
            let d = pool.distribution(anc, Basis::Z).unwrap();
            assert!((d[i % 2] - 1.0).abs() < TOLERANCE);
        }
    }
}
