//! Pauli one-time pad: `X^a Z^b` encryption, decryption, and the CNOT key
//! update that lets a key holder decrypt after homomorphic evaluation.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::StateError;
use crate::pool::{QubitId, QubitPool};
use crate::state::{Gate, StateVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QotpError {
    #[error("{keys} keys for {wires} wires")]
    KeyCount { keys: usize, wires: usize },
    #[error("decryption of an item pair takes exactly 2 wires, got {0}")]
    PairWidth(usize),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Exponents of one `X^a Z^b` pad.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PauliKey {
    pub a: bool,
    pub b: bool,
}

impl PauliKey {
    pub const fn new(a: bool, b: bool) -> Self {
        PauliKey { a, b }
    }

    /// X-only pad, the only kind the set protocol uses.
    pub const fn x(a: bool) -> Self {
        PauliKey { a, b: false }
    }
}

/// The two X exponents `(α_j, β_j)` padding the two qubits of item `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct KeyPair2 {
    pub alpha: bool,
    pub beta: bool,
}

impl KeyPair2 {
    pub const fn new(alpha: bool, beta: bool) -> Self {
        KeyPair2 { alpha, beta }
    }

    pub fn xor(self, other: KeyPair2) -> KeyPair2 {
        KeyPair2 { alpha: self.alpha ^ other.alpha, beta: self.beta ^ other.beta }
    }

    pub fn as_pauli(self) -> [PauliKey; 2] {
        [PauliKey::x(self.alpha), PauliKey::x(self.beta)]
    }
}

/// Updated key `sk = (ζ, η)` over a register: `ζ` are X exponents, `η` Z exponents.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DecryptionKey {
    pub zeta: Vec<bool>,
    pub eta: Vec<bool>,
}

impl DecryptionKey {
    pub fn from_keys(keys: &[PauliKey]) -> Self {
        DecryptionKey { zeta: keys.iter().map(|k| k.a).collect(), eta: keys.iter().map(|k| k.b).collect() }
    }

    pub fn keys(&self) -> Vec<PauliKey> {
        self.zeta.iter().zip(&self.eta).map(|(&a, &b)| PauliKey::new(a, b)).collect()
    }
}

/// Applies `X^a Z^b` (Z first) on each wire.
pub fn encrypt(state: &StateVector, keys: &[PauliKey], wires: &[usize]) -> Result<StateVector, QotpError> {
    if keys.len() != wires.len() {
        return Err(QotpError::KeyCount { keys: keys.len(), wires: wires.len() });
    }
    let mut out = state.clone();
    for (key, &w) in keys.iter().zip(wires) {
        if key.b {
            out.apply(Gate::z(w))?;
        }
        if key.a {
            out.apply(Gate::x(w))?;
        }
    }
    Ok(out)
}

/// Inverse of [`encrypt`]: applies `(X^a Z^b)† = Z^b X^a` on each wire.
pub fn decrypt_pauli(state: &StateVector, keys: &[PauliKey], wires: &[usize]) -> Result<StateVector, QotpError> {
    if keys.len() != wires.len() {
        return Err(QotpError::KeyCount { keys: keys.len(), wires: wires.len() });
    }
    let mut out = state.clone();
    for (key, &w) in keys.iter().zip(wires) {
        if key.a {
            out.apply(Gate::x(w))?;
        }
        if key.b {
            out.apply(Gate::z(w))?;
        }
    }
    Ok(out)
}

/// Key update across `CNOT(control → target)`:
/// `(a_c, b_c), (a_t, b_t) ↦ (a_c, b_c ⊕ b_t), (a_c ⊕ a_t, b_t)`.
pub fn cnot_key_update(control: PauliKey, target: PauliKey) -> (PauliKey, PauliKey) {
    (PauliKey::new(control.a, control.b ^ target.b), PauliKey::new(control.a ^ target.a, target.b))
}

/// The third party's decryption key for an evaluated target pair. It is
/// built from the published XOR relation only; individual pads never reach
/// this function.
pub fn derive_tp_decryption_key(xor_alpha: bool, xor_beta: bool) -> KeyPair2 {
    KeyPair2::new(xor_alpha, xor_beta)
}

/// Applies `X^ζ ⊗ X^η` to the two target wires.
pub fn decrypt(state: &StateVector, sk: KeyPair2, wires: &[usize]) -> Result<StateVector, QotpError> {
    if wires.len() != 2 {
        return Err(QotpError::PairWidth(wires.len()));
    }
    decrypt_pauli(state, &sk.as_pauli(), wires)
}

/// Pool variant of [`encrypt`] for qubits spread over several registers.
pub fn encrypt_qubits(pool: &mut QubitPool, keys: &[PauliKey], qubits: &[QubitId]) -> Result<(), QotpError> {
    if keys.len() != qubits.len() {
        return Err(QotpError::KeyCount { keys: keys.len(), wires: qubits.len() });
    }
    for (key, &q) in keys.iter().zip(qubits) {
        if key.b {
            pool.apply_z(q)?;
        }
        if key.a {
            pool.apply_x(q)?;
        }
    }
    Ok(())
}

/// Pool variant of [`decrypt`].
pub fn decrypt_qubits(pool: &mut QubitPool, sk: KeyPair2, qubits: &[QubitId]) -> Result<(), QotpError> {
    if qubits.len() != 2 {
        return Err(QotpError::PairWidth(qubits.len()));
    }
    for (key, &q) in sk.as_pauli().iter().zip(qubits) {
        if key.a {
            pool.apply_x(q)?;
        }
        if key.b {
            pool.apply_z(q)?;
        }
    }
    Ok(())
}
