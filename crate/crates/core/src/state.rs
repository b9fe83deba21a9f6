//! Dense statevector engine.
//!
//! Only the gates the protocol needs are provided: `X`, `Z`, `H` and `CNOT`,
//! plus computational (`Z`) and Hadamard (`X`) basis measurements.
//!
//! Qubit ordering: qubit 0 is the most significant bit of a basis-state
//! label, so `|01⟩` on two qubits is amplitude index 1 and qubit 1 carries
//! the `1`. Every module in this crate follows that convention.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use core::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::StateError;

/// Tolerance used for every algebraic identity (norms, unitarity, mixing).
pub const TOLERANCE: f64 = 1e-12;

/// Probabilities below this are treated as structural zeros when building
/// outcome maps. Any genuine outcome in registers of this size is far above it.
const PROB_FLOOR: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Basis {
    /// Computational basis `{|0⟩, |1⟩}`.
    Z,
    /// Hadamard basis `{|+⟩, |−⟩}`; outcome 0 is `+`, outcome 1 is `−`.
    X,
}

impl Basis {
    /// Printable label of a single-qubit outcome in this basis.
    pub fn label(self, bit: bool) -> char {
        match (self, bit) {
            (Basis::Z, false) => '0',
            (Basis::Z, true) => '1',
            (Basis::X, false) => '+',
            (Basis::X, true) => '-',
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Z => f.write_str("Z"),
            Basis::X => f.write_str("X"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Z,
    H,
    Cnot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    /// Set for `CNOT` only.
    pub control: Option<usize>,
}

impl Gate {
    pub const fn x(target: usize) -> Self {
        Gate { kind: GateKind::X, target, control: None }
    }

    pub const fn z(target: usize) -> Self {
        Gate { kind: GateKind::Z, target, control: None }
    }

    pub const fn h(target: usize) -> Self {
        Gate { kind: GateKind::H, target, control: None }
    }

    pub const fn cnot(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::Cnot, target, control: Some(control) }
    }

    fn validate(&self, num_qubits: usize) -> Result<(), StateError> {
        check_index(self.target, num_qubits)?;
        match (self.kind, self.control) {
            (GateKind::Cnot, Some(c)) => {
                check_index(c, num_qubits)?;
                if c == self.target {
                    return Err(StateError::ControlEqualsTarget(c));
                }
                Ok(())
            }
            (GateKind::Cnot, None) => Err(StateError::MissingControl),
            (_, Some(_)) => Err(StateError::UnexpectedControl),
            (_, None) => Ok(()),
        }
    }
}

fn check_index(index: usize, num_qubits: usize) -> Result<(), StateError> {
    if index >= num_qubits {
        Err(StateError::QubitOutOfRange { index, num_qubits })
    } else {
        Ok(())
    }
}

/// Outcome of a measurement: one bit per measured qubit, in the order the
/// qubits were listed.
pub type Outcome = Vec<bool>;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self, StateError> {
        Self::basis_state(num_qubits, 0)
    }

    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self, StateError> {
        if num_qubits == 0 {
            return Err(StateError::NoQubits);
        }
        if num_qubits >= usize::BITS as usize || index >= 1usize << num_qubits {
            return Err(StateError::BasisIndexOutOfRange { index, num_qubits });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amplitudes })
    }

    /// Computational basis state from its label, qubit 0 first.
    pub fn from_bits(bits: &[bool]) -> Result<Self, StateError> {
        Self::basis_state(bits.len(), bits_to_index(bits))
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(StateError::BadLength(len));
        }
        let state = StateVector { num_qubits: len.trailing_zeros() as usize, amplitudes };
        let norm = state.norm_sqr();
        if libm::fabs(norm - 1.0) > TOLERANCE {
            return Err(StateError::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Largest entrywise amplitude difference. Panics on size mismatch.
    pub fn max_deviation(&self, other: &StateVector) -> f64 {
        assert_eq!(self.num_qubits, other.num_qubits, "register size mismatch");
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| libm::sqrt((a - b).norm_sqr())).fold(0.0, f64::max)
    }

    /// `self ⊗ other`; `self`'s qubits come first.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        StateVector { num_qubits: self.num_qubits + other.num_qubits, amplitudes }
    }

    fn mask(&self, wire: usize) -> usize {
        1 << (self.num_qubits - 1 - wire)
    }

    pub fn apply_gate(&self, gate: Gate) -> Result<StateVector, StateError> {
        let mut out = self.clone();
        out.apply(gate)?;
        Ok(out)
    }

    /// In-place variant of [`StateVector::apply_gate`].
    pub fn apply(&mut self, gate: Gate) -> Result<(), StateError> {
        gate.validate(self.num_qubits)?;
        let t = self.mask(gate.target);
        match gate.kind {
            GateKind::X => {
                for i in 0..self.amplitudes.len() {
                    if i & t == 0 {
                        self.amplitudes.swap(i, i | t);
                    }
                }
            }
            GateKind::Z => {
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    if i & t != 0 {
                        *a = -*a;
                    }
                }
            }
            GateKind::H => {
                for i in 0..self.amplitudes.len() {
                    if i & t == 0 {
                        let a0 = self.amplitudes[i];
                        let a1 = self.amplitudes[i | t];
                        self.amplitudes[i] = (a0 + a1) * FRAC_1_SQRT_2;
                        self.amplitudes[i | t] = (a0 - a1) * FRAC_1_SQRT_2;
                    }
                }
            }
            GateKind::Cnot => {
                // validated above
                let c = self.mask(gate.control.unwrap_or_default());
                for i in 0..self.amplitudes.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amplitudes.swap(i, i | t);
                    }
                }
            }
        }
        Ok(())
    }

    fn check_qubit_list(&self, qubits: &[usize]) -> Result<(), StateError> {
        if qubits.is_empty() {
            return Err(StateError::EmptyQubitList);
        }
        for (n, &q) in qubits.iter().enumerate() {
            check_index(q, self.num_qubits)?;
            if qubits[..n].contains(&q) {
                return Err(StateError::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    fn rotated(&self, qubits: &[usize], basis: Basis) -> Result<StateVector, StateError> {
        let mut work = self.clone();
        if basis == Basis::X {
            for &q in qubits {
                work.apply(Gate::h(q))?;
            }
        }
        Ok(work)
    }

    fn outcome_of(&self, index: usize, qubits: &[usize]) -> Outcome {
        qubits.iter().map(|&q| index & self.mask(q) != 0).collect()
    }

    /// Exact Born distribution of measuring `qubits` in `basis`.
    pub fn measurement_distribution(
        &self,
        qubits: &[usize],
        basis: Basis,
    ) -> Result<BTreeMap<Outcome, f64>, StateError> {
        self.check_qubit_list(qubits)?;
        let work = self.rotated(qubits, basis)?;
        let mut dist: BTreeMap<Outcome, f64> = BTreeMap::new();
        for (i, a) in work.amplitudes.iter().enumerate() {
            *dist.entry(work.outcome_of(i, qubits)).or_insert(0.0) += a.norm_sqr();
        }
        dist.retain(|_, p| *p > PROB_FLOOR);
        Ok(dist)
    }

    /// Samples a measurement of `qubits` in `basis` and returns the outcome
    /// together with the post-measurement state.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        basis: Basis,
        rng: &mut R,
    ) -> Result<(Outcome, StateVector), StateError> {
        let dist = self.measurement_distribution(qubits, basis)?;
        let draw: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = None;
        for (outcome, p) in &dist {
            acc += p;
            chosen = Some((outcome, *p));
            if draw < acc {
                break;
            }
        }
        // dist is never empty for a normalized state
        let (outcome, prob) = chosen.ok_or(StateError::NotNormalized(0.0))?;
        let outcome = outcome.clone();

        let mut work = self.rotated(qubits, basis)?;
        let scale = 1.0 / libm::sqrt(prob);
        for i in 0..work.amplitudes.len() {
            if work.outcome_of(i, qubits) == outcome {
                work.amplitudes[i] *= scale;
            } else {
                work.amplitudes[i] = Complex64::new(0.0, 0.0);
            }
        }
        if basis == Basis::X {
            for &q in qubits {
                work.apply(Gate::h(q))?;
            }
        }
        Ok((outcome, work))
    }

    /// Drops `wire`, assuming it is in the computational basis state `|bit⟩`
    /// and unentangled (true right after a Z measurement). The remaining
    /// amplitudes are renormalized. Fails on a single-qubit register.
    pub fn project_out(&self, wire: usize, bit: bool) -> Result<StateVector, StateError> {
        check_index(wire, self.num_qubits)?;
        if self.num_qubits == 1 {
            return Err(StateError::NoQubits);
        }
        let m = self.mask(wire);
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() / 2);
        for (i, a) in self.amplitudes.iter().enumerate() {
            if (i & m != 0) == bit {
                amplitudes.push(*a);
            }
        }
        let norm = libm::sqrt(amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>());
        if norm <= 0.0 {
            return Err(StateError::NotNormalized(0.0));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(StateVector { num_qubits: self.num_qubits - 1, amplitudes })
    }

    /// Reduced density matrix of `keep` (in that order), tracing out the rest.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix, StateError> {
        self.check_qubit_list(keep)?;
        let dim = 1usize << keep.len();
        let keep_mask: usize = keep.iter().map(|&q| self.mask(q)).fold(0, |a, b| a | b);
        let sub_index = |i: usize| keep.iter().fold(0usize, |acc, &q| (acc << 1) | usize::from(i & self.mask(q) != 0));
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        let len = self.amplitudes.len();
        for i in 0..len {
            let ai = self.amplitudes[i];
            if ai.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..len {
                if i & !keep_mask == j & !keep_mask {
                    entries[sub_index(i) * dim + sub_index(j)] += ai * self.amplitudes[j].conj();
                }
            }
        }
        DensityMatrix::from_entries(dim, entries)
    }

    pub fn to_density(&self) -> DensityMatrix {
        let all: Vec<usize> = (0..self.num_qubits).collect();
        // `all` is a valid, duplicate-free list
        self.reduced_density(&all).expect("full register")
    }
}

pub(crate) fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn x_flips_zero() {
        let s = StateVector::zero(1).unwrap().apply_gate(Gate::x(0)).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.0), c(1.0)]);
    }

    #[test]
    fn hadamard_on_zero() {
        let s = StateVector::zero(1).unwrap().apply_gate(Gate::h(0)).unwrap();
        assert!((s.amplitude(0).re - FRAC_1_SQRT_2).abs() < TOLERANCE);
        assert!((s.amplitude(1).re - FRAC_1_SQRT_2).abs() < TOLERANCE);
    }

    #[test]
    fn cnot_on_10_gives_11() {
        let s = StateVector::from_bits(&[true, false]).unwrap();
        let out = s.apply_gate(Gate::cnot(0, 1)).unwrap();
        assert_eq!(out, StateVector::from_bits(&[true, true]).unwrap());
    }

    #[test]
    fn cnot_matrix_rows() {
        // rows of the 4x4 CNOT matrix: |00>->|00>, |01>->|01>, |10>->|11>, |11>->|10>
        for (input, expected) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            let s = StateVector::basis_state(2, input).unwrap();
            let out = s.apply_gate(Gate::cnot(0, 1)).unwrap();
            assert_eq!(out, StateVector::basis_state(2, expected).unwrap());
        }
    }

    #[test]
    fn gate_errors() {
        let s = StateVector::zero(2).unwrap();
        assert_eq!(s.apply_gate(Gate::x(2)), Err(StateError::QubitOutOfRange { index: 2, num_qubits: 2 }));
        assert_eq!(s.apply_gate(Gate::cnot(1, 1)), Err(StateError::ControlEqualsTarget(1)));
        assert_eq!(
            s.apply_gate(Gate { kind: GateKind::Cnot, target: 0, control: None }),
            Err(StateError::MissingControl)
        );
        assert_eq!(
            s.apply_gate(Gate { kind: GateKind::X, target: 0, control: Some(1) }),
            Err(StateError::UnexpectedControl)
        );
    }

    #[test]
    fn eigenstates_measure_deterministically() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let plus = StateVector::zero(1).unwrap().apply_gate(Gate::h(0)).unwrap();
        for _ in 0..32 {
            let (o, post) = plus.measure(&[0], Basis::X, &mut rng).unwrap();
            assert_eq!(o, vec![false]);
            assert!(post.max_deviation(&plus) < TOLERANCE);
            let (o, _) = StateVector::zero(1).unwrap().measure(&[0], Basis::Z, &mut rng).unwrap();
            assert_eq!(o, vec![false]);
        }
    }

    #[test]
    fn distributions_of_simple_states() {
        let zero = StateVector::zero(1).unwrap();
        let d = zero.measurement_distribution(&[0], Basis::Z).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d[&vec![false]] - 1.0).abs() < TOLERANCE);

        let plus = zero.apply_gate(Gate::h(0)).unwrap();
        let d = plus.measurement_distribution(&[0], Basis::Z).unwrap();
        assert!((d[&vec![false]] - 0.5).abs() < TOLERANCE);
        assert!((d[&vec![true]] - 0.5).abs() < TOLERANCE);
    }

    #[test]
    fn measurement_list_errors() {
        let s = StateVector::zero(2).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        assert_eq!(s.measure(&[], Basis::Z, &mut rng).unwrap_err(), StateError::EmptyQubitList);
        assert_eq!(s.measurement_distribution(&[0, 0], Basis::Z).unwrap_err(), StateError::DuplicateQubit(0));
    }

    #[test]
    fn collapse_keeps_partner_correlated() {
        // Bell pair: measuring qubit 0 fixes qubit 1
        let mut bell = StateVector::zero(2).unwrap();
        bell.apply(Gate::h(0)).unwrap();
        bell.apply(Gate::cnot(0, 1)).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..16 {
            let (o, post) = bell.measure(&[0], Basis::Z, &mut rng).unwrap();
            let d = post.measurement_distribution(&[1], Basis::Z).unwrap();
            assert_eq!(d.len(), 1);
            assert!(d.contains_key(&o));
            assert!((post.norm_sqr() - 1.0).abs() < TOLERANCE);
        }
    }

    #[test]
    fn project_out_drops_a_wire() {
        let s = StateVector::from_bits(&[true, false, true]).unwrap();
        let r = s.project_out(1, false).unwrap();
        assert_eq!(r, StateVector::from_bits(&[true, true]).unwrap());
        assert!(StateVector::zero(1).unwrap().project_out(0, false).is_err());
    }

    #[test]
    fn from_amplitudes_validates() {
        assert_eq!(StateVector::from_amplitudes(vec![c(1.0); 3]), Err(StateError::BadLength(3)));
        assert!(matches!(StateVector::from_amplitudes(vec![c(1.0), c(1.0)]), Err(StateError::NotNormalized(_))));
        assert!(StateVector::from_amplitudes(vec![c(0.6), c(0.8)]).is_ok());
    }

    #[test]
    fn reduced_density_of_bell_is_mixed() {
        let mut bell = StateVector::zero(2).unwrap();
        bell.apply(Gate::h(0)).unwrap();
        bell.apply(Gate::cnot(0, 1)).unwrap();
        let rho = bell.reduced_density(&[1]).unwrap();
        assert!(rho.max_deviation(&DensityMatrix::maximally_mixed(2)) < TOLERANCE);
    }
}
