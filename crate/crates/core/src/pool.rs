//! Session-wide qubit arena.
//!
//! A protocol session handles hundreds of qubits, but entanglement only ever
//! spans a handful of them (one `|Ψ⟩` triple plus adversary ancillas, or one
//! evaluated item pair). The pool keeps the global state as a product of
//! small [`StateVector`] registers and merges two registers only when a CNOT
//! crosses them. Measured qubits are split back out into their own register.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::StateError;
use crate::state::{Basis, Gate, GateKind, StateVector};

/// Handle to one physical qubit in a [`QubitPool`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QubitId(usize);

impl QubitId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    register: usize,
    wire: usize,
}

#[derive(Debug, Clone)]
struct Register {
    state: StateVector,
    qubits: Vec<QubitId>,
}

#[derive(Debug, Clone, Default)]
pub struct QubitPool {
    registers: Vec<Option<Register>>,
    slots: Vec<Slot>,
}

impl QubitPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of qubits ever allocated.
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Adds `state` as a fresh register and returns handles to its qubits in
    /// wire order.
    pub fn alloc(&mut self, state: StateVector) -> Vec<QubitId> {
        let register = self.registers.len();
        let qubits: Vec<QubitId> = (0..state.num_qubits())
            .map(|wire| {
                self.slots.push(Slot { register, wire });
                QubitId(self.slots.len() - 1)
            })
            .collect();
        self.registers.push(Some(Register { state, qubits: qubits.clone() }));
        qubits
    }

    /// Allocates one qubit in `|bit⟩` (Z) or `|±⟩` (X).
    pub fn alloc_qubit(&mut self, basis: Basis, bit: bool) -> QubitId {
        let mut s = StateVector::from_bits(&[bit]).expect("one qubit");
        if basis == Basis::X {
            s.apply(Gate::h(0)).expect("wire 0");
        }
        self.alloc(s)[0]
    }

    fn slot(&self, q: QubitId) -> Result<Slot, StateError> {
        self.slots.get(q.0).copied().ok_or(StateError::QubitOutOfRange { index: q.0, num_qubits: self.slots.len() })
    }

    fn register(&self, index: usize) -> &Register {
        self.registers[index].as_ref().expect("live register")
    }

    fn register_mut(&mut self, index: usize) -> &mut Register {
        self.registers[index].as_mut().expect("live register")
    }

    /// Merges register `b` into register `a` (`a`'s wires first).
    fn merge(&mut self, a: usize, b: usize) {
        let rb = self.registers[b].take().expect("live register");
        let offset = self.register(a).qubits.len();
        for (wire, q) in rb.qubits.iter().enumerate() {
            self.slots[q.0] = Slot { register: a, wire: offset + wire };
        }
        let ra = self.register_mut(a);
        ra.state = ra.state.tensor(&rb.state);
        ra.qubits.extend(rb.qubits);
    }

    pub fn apply_x(&mut self, q: QubitId) -> Result<(), StateError> {
        self.apply_single(GateKind::X, q)
    }

    pub fn apply_z(&mut self, q: QubitId) -> Result<(), StateError> {
        self.apply_single(GateKind::Z, q)
    }

    pub fn apply_h(&mut self, q: QubitId) -> Result<(), StateError> {
        self.apply_single(GateKind::H, q)
    }

    fn apply_single(&mut self, kind: GateKind, q: QubitId) -> Result<(), StateError> {
        let slot = self.slot(q)?;
        let gate = Gate { kind, target: slot.wire, control: None };
        self.register_mut(slot.register).state.apply(gate)
    }

    pub fn apply_cnot(&mut self, control: QubitId, target: QubitId) -> Result<(), StateError> {
        if control == target {
            return Err(StateError::ControlEqualsTarget(control.0));
        }
        let c = self.slot(control)?;
        let t = self.slot(target)?;
        if c.register != t.register {
            self.merge(c.register, t.register);
        }
        let c = self.slot(control)?;
        let t = self.slot(target)?;
        self.register_mut(c.register).state.apply(Gate::cnot(c.wire, t.wire))
    }

    /// Measures `q` in `basis`, leaving it in a register of its own prepared
    /// in the observed eigenstate.
    pub fn measure<R: Rng + ?Sized>(&mut self, q: QubitId, basis: Basis, rng: &mut R) -> Result<bool, StateError> {
        let slot = self.slot(q)?;
        let reg = self.register(slot.register);
        let (outcome, collapsed) = reg.state.measure(&[slot.wire], basis, rng)?;
        let bit = outcome[0];
        if reg.qubits.len() > 1 {
            let mut rotated = collapsed;
            if basis == Basis::X {
                rotated.apply(Gate::h(slot.wire))?;
            }
            let rest = rotated.project_out(slot.wire, bit)?;
            let reg = self.register_mut(slot.register);
            reg.state = rest;
            reg.qubits.remove(slot.wire);
            for (wire, other) in reg.qubits.clone().into_iter().enumerate() {
                self.slots[other.0].wire = wire;
            }
            let mut own = StateVector::from_bits(&[bit])?;
            if basis == Basis::X {
                own.apply(Gate::h(0))?;
            }
            self.registers.push(Some(Register { state: own, qubits: vec![q] }));
            self.slots[q.0] = Slot { register: self.registers.len() - 1, wire: 0 };
        } else {
            self.register_mut(slot.register).state = collapsed;
        }
        Ok(bit)
    }

    /// Joint pure state of the registers holding `qubits`, with the position
    /// of each requested qubit inside it.
    fn joint(&self, qubits: &[QubitId]) -> Result<(StateVector, Vec<usize>), StateError> {
        let mut regs: Vec<usize> = Vec::new();
        for &q in qubits {
            let r = self.slot(q)?.register;
            if !regs.contains(&r) {
                regs.push(r);
            }
        }
        let mut offsets = Vec::with_capacity(regs.len());
        let mut state: Option<StateVector> = None;
        for &r in &regs {
            let reg = self.register(r);
            offsets.push(state.as_ref().map_or(0, StateVector::num_qubits));
            state = Some(match state {
                None => reg.state.clone(),
                Some(s) => s.tensor(&reg.state),
            });
        }
        let state = state.ok_or(StateError::EmptyQubitList)?;
        let wires = qubits
            .iter()
            .map(|&q| {
                let s = self.slots[q.0];
                let pos = regs.iter().position(|&r| r == s.register).expect("collected above");
                offsets[pos] + s.wire
            })
            .collect();
        Ok((state, wires))
    }

    /// Reduced density matrix of `qubits`, in the order given.
    pub fn reduced_density(&self, qubits: &[QubitId]) -> Result<DensityMatrix, StateError> {
        let (state, wires) = self.joint(qubits)?;
        state.reduced_density(&wires)
    }

    /// Pure state of exactly `qubits` (in that order) when they form a closed
    /// subsystem unentangled with anything else; `None` otherwise.
    pub fn pure_state(&self, qubits: &[QubitId]) -> Result<Option<StateVector>, StateError> {
        let (state, wires) = self.joint(qubits)?;
        if state.num_qubits() != qubits.len() {
            return Ok(None);
        }
        // reorder into the requested wire order
        let n = qubits.len();
        let mut amplitudes = vec![num_complex::Complex64::new(0.0, 0.0); 1 << n];
        for (i, a) in state.amplitudes().iter().enumerate() {
            let j = wires.iter().fold(0usize, |acc, &w| (acc << 1) | usize::from(i & (1 << (n - 1 - w)) != 0));
            amplitudes[j] = *a;
        }
        StateVector::from_amplitudes(amplitudes).map(Some)
    }

    /// Number of qubits sharing a register with `q` (including `q`).
    pub fn register_size(&self, q: QubitId) -> Result<usize, StateError> {
        Ok(self.register(self.slot(q)?.register).qubits.len())
    }

    /// Exact Born distribution of a Z/X measurement of `q` alone.
    pub fn distribution(&self, q: QubitId, basis: Basis) -> Result<[f64; 2], StateError> {
        let slot = self.slot(q)?;
        let d = self.register(slot.register).state.measurement_distribution(&[slot.wire], basis)?;
        Ok([d.get(&vec![false]).copied().unwrap_or(0.0), d.get(&vec![true]).copied().unwrap_or(0.0)])
    }
}
