//! Simulator core for a quantum-homomorphic private set intersection and
//! union cardinality protocol with a semi-honest third party.
//!
//! Everything here is `no_std` + `alloc`. Randomness is always passed in by
//! the caller.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod channel;
pub mod density;
pub mod encoding;
pub mod engine;
pub mod error;
pub mod keygen;
pub mod pool;
pub mod qotp;
pub mod state;

pub use channel::{Adversary, AdversaryStrategy, BasisPolicy, ChannelReport, DecoyState};
pub use density::DensityMatrix;
pub use encoding::{BinaryMask, KeySource, MaskedSet, PrivateSet, Side};
pub use engine::{
    make_groups, run_multi_party, run_two_party, EngineError, MembershipCode, ProtocolConfig, ProtocolResult,
};
pub use error::StateError;
pub use keygen::{KeygenConfig, KeygenReport, TpBehavior};
pub use pool::{QubitId, QubitPool};
pub use qotp::{KeyPair2, PauliKey};
pub use state::{Basis, Gate, StateVector};
