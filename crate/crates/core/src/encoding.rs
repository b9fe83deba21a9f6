//! Privacy encoding: multiplicative masking of sets in `Z_q`, the shared
//! binary mask, and the two-qubit item states.
//!
//! Item `j` of a masked set becomes a two-qubit computational basis state
//! whose label depends on membership and on mask bit `k′_j`:
//!
//! | `k′_j` | side | `j ∉ S*` | `j ∈ S*` |
//! |--------|------|----------|----------|
//! | 0      | A    | `00`     | `01`     |
//! | 0      | B    | `11`     | `01`     |
//! | 1      | A    | `11`     | `10`     |
//! | 1      | B    | `00`     | `10`     |
//!
//! Whatever the mask bit, the XOR of the A and B labels is `00` (both),
//! `01` (B only), `10` (A only) or `11` (neither).

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pool::QubitPool;
use crate::state::{Basis, StateVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("element {element} is outside Z_{q}")]
    ElementOutOfRange { element: u64, q: u64 },
    #[error("element {0} appears twice")]
    DuplicateElement(u64),
    #[error("multiplier {k} is not invertible mod {q}")]
    NonInvertibleMultiplier { k: u64, q: u64 },
    #[error("binary mask has {found} bits, expected {expected}")]
    MaskLength { expected: usize, found: usize },
}

/// A private set inside `Z_q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivateSet {
    q: u64,
    elements: BTreeSet<u64>,
}

impl PrivateSet {
    pub fn new<I: IntoIterator<Item = u64>>(q: u64, elements: I) -> Result<Self, EncodingError> {
        if q < 2 {
            return Err(EncodingError::InvalidModulus(q));
        }
        let mut set = BTreeSet::new();
        for e in elements {
            if e >= q {
                return Err(EncodingError::ElementOutOfRange { element: e, q });
            }
            if !set.insert(e) {
                return Err(EncodingError::DuplicateElement(e));
            }
        }
        Ok(PrivateSet { q, elements: set })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn elements(&self) -> &BTreeSet<u64> {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskedSet {
    q: u64,
    elements: BTreeSet<u64>,
}

impl MaskedSet {
    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn elements(&self) -> &BTreeSet<u64> {
        &self.elements
    }

    pub fn contains(&self, j: u64) -> bool {
        self.elements.contains(&j)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(q)) as u64
}

/// Inverse of `k` modulo `q`, if it exists.
pub fn mod_inverse(k: u64, q: u64) -> Option<u64> {
    let (mut r0, mut r1) = (i128::from(q), i128::from(k % q));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let quot = r0 / r1;
        (r0, r1) = (r1, r0 - quot * r1);
        (t0, t1) = (t1, t0 - quot * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(i128::from(q)) as u64)
}

/// `{ k·x mod q : x ∈ s }`. `k` must be a unit of `Z_q`, otherwise distinct
/// elements could collide and the cardinalities would be wrong.
pub fn mask_set(s: &PrivateSet, k: u64) -> Result<MaskedSet, EncodingError> {
    let q = s.q;
    if gcd(k % q, q) != 1 {
        return Err(EncodingError::NonInvertibleMultiplier { k, q });
    }
    let elements = s.elements.iter().map(|&x| mul_mod(k, x, q)).collect();
    Ok(MaskedSet { q, elements })
}

/// Shared binary key `kb = (k′_0, …, k′_{q−1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryMask {
    pub bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(bits: Vec<bool>) -> Self {
        BinaryMask { bits }
    }

    pub fn zeros(q: usize) -> Self {
        BinaryMask { bits: alloc::vec![false; q] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// Control side of the evaluation (Alice, or the first user of a group).
    A,
    /// Target side (Bob, or the second user of a group).
    B,
}

/// Two-bit label of item `j` for one side.
pub fn item_bits(member: bool, mask_bit: bool, side: Side) -> [bool; 2] {
    match (mask_bit, side, member) {
        (false, Side::A, false) => [false, false],
        (false, Side::A, true) => [false, true],
        (false, Side::B, false) => [true, true],
        (false, Side::B, true) => [false, true],
        (true, Side::A, false) => [true, true],
        (true, Side::A, true) => [true, false],
        (true, Side::B, false) => [false, false],
        (true, Side::B, true) => [true, false],
    }
}

/// Item labels for `j = 0..q−1`.
pub fn prepare_item_bits(masked: &MaskedSet, mask: &BinaryMask, side: Side) -> Result<Vec<[bool; 2]>, EncodingError> {
    let q = masked.q as usize;
    if mask.len() != q {
        return Err(EncodingError::MaskLength { expected: q, found: mask.len() });
    }
    Ok((0..q).map(|j| item_bits(masked.contains(j as u64), mask.bits[j], side)).collect())
}

/// Item states `|φ_j⟩` (side A) or `|ψ_j⟩` (side B) for `j = 0..q−1`.
pub fn prepare_item_states(
    masked: &MaskedSet,
    mask: &BinaryMask,
    side: Side,
) -> Result<Vec<StateVector>, EncodingError> {
    Ok(prepare_item_bits(masked, mask, side)?.iter().map(|b| StateVector::from_bits(b).expect("two qubits")).collect())
}

/// Where the users' shared classical keys (`k` and `kb`) come from. The
/// third party never subscribes to a key source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeySource {
    /// Ideal shared randomness: every subscriber reads the same seeded stream.
    IdealOracle { seed: u64 },
    /// Prepare-and-measure BB84 between two subscribers over an honest
    /// channel; sifted bits feed the keys.
    SimulatedQkd { seed: u64 },
}

impl KeySource {
    /// Independent shared stream for `domain` (e.g. one per group mask).
    pub fn stream(&self, domain: u64) -> SharedBits {
        match *self {
            KeySource::IdealOracle { seed } => {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                rng.set_stream(domain);
                SharedBits::Ideal(rng)
            }
            KeySource::SimulatedQkd { seed } => {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                rng.set_stream(domain);
                SharedBits::Qkd(Bb84Stream { rng, buffer: Vec::new(), rounds: 0 })
            }
        }
    }
}

/// A bit stream read identically by all subscribers of a [`KeySource`].
#[derive(Debug, Clone)]
pub enum SharedBits {
    Ideal(ChaCha20Rng),
    Qkd(Bb84Stream),
}

impl SharedBits {
    pub fn next_bit(&mut self) -> bool {
        match self {
            SharedBits::Ideal(rng) => rng.next_u32() & 1 == 1,
            SharedBits::Qkd(s) => s.next_bit(),
        }
    }

    /// Uniform integer in `[0, 2^bits)`.
    pub fn next_bits(&mut self, bits: u32) -> u64 {
        (0..bits).fold(0, |acc, _| (acc << 1) | u64::from(self.next_bit()))
    }
}

/// Sifted-key generator: each round the sender encodes a random bit in a
/// random basis, the receiver measures in a random basis, and matching
/// rounds are kept.
#[derive(Debug, Clone)]
pub struct Bb84Stream {
    rng: ChaCha20Rng,
    /// Sifted bits not yet consumed, oldest last.
    buffer: Vec<bool>,
    rounds: u64,
}

impl Bb84Stream {
    const BATCH: usize = 64;

    /// Raw rounds run so far.
    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    fn refill(&mut self) {
        let mut pool = QubitPool::new();
        let mut sifted = Vec::new();
        while sifted.is_empty() {
            for _ in 0..Self::BATCH {
                self.rounds += 1;
                let bit: bool = self.rng.gen();
                let send_basis = if self.rng.gen() { Basis::X } else { Basis::Z };
                let recv_basis = if self.rng.gen() { Basis::X } else { Basis::Z };
                let q = pool.alloc_qubit(send_basis, bit);
                let seen = pool.measure(q, recv_basis, &mut self.rng).expect("fresh qubit");
                if send_basis == recv_basis {
                    debug_assert_eq!(seen, bit, "honest BB84 sifted bits agree");
                    sifted.push(seen);
                }
            }
        }
        sifted.reverse();
        self.buffer = sifted;
    }

    fn next_bit(&mut self) -> bool {
        if self.buffer.is_empty() {
            self.refill();
        }
        self.buffer.pop().expect("refilled")
    }
}

/// Shared multiplier `k`, uniform over the units of `Z_q`.
pub fn draw_multiplier(source: &KeySource, q: u64) -> Result<u64, EncodingError> {
    draw_multiplier_from(&mut source.stream(0), q)
}

pub fn draw_multiplier_from(bits: &mut SharedBits, q: u64) -> Result<u64, EncodingError> {
    if q < 2 {
        return Err(EncodingError::InvalidModulus(q));
    }
    let width = 64 - (q - 1).leading_zeros();
    loop {
        let k = bits.next_bits(width);
        if k != 0 && k < q && gcd(k, q) == 1 {
            return Ok(k);
        }
    }
}

/// Binary mask of length `q` for `domain` (one domain per group).
pub fn draw_mask(source: &KeySource, q: u64, domain: u64) -> BinaryMask {
    // domain 0 is reserved for the multiplier
    let mut bits = source.stream(domain + 1);
    BinaryMask::new((0..q).map(|_| bits.next_bit()).collect())
}
