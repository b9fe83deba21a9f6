//! Protocol orchestration: encryption, transmission, CNOT evaluation,
//! decryption and counting, for two parties and for `m` parties in groups.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{send_with_decoys, Adversary, AdversaryStrategy, ChannelError, ChannelReport};
use crate::encoding::{
    draw_mask, draw_multiplier, mask_set, prepare_item_bits, BinaryMask, EncodingError, KeySource, MaskedSet,
    PrivateSet, Side,
};
use crate::error::StateError;
use crate::keygen::{
    run_keygen, KeygenConfig, KeygenError, KeygenReport, OwnerPad, SharedKeyMaterial, TpBehavior, TpKeyView,
};
use crate::pool::{QubitId, QubitPool};
use crate::qotp::{decrypt_qubits, derive_tp_decryption_key, encrypt_qubits, KeyPair2, QotpError};
use crate::state::{Basis, Gate, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    KeyGeneration,
    Encoding,
    Evaluation,
    Publication,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    QuantumSequence { payload: usize, decoys: usize },
    Announcement { what: String, bits: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEvent {
    pub phase: Phase,
    pub from: String,
    pub to: String,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    DataOwner,
    ThirdParty,
}

/// Role-filtered key material. A third party can only ever hold the XOR
/// relation; constructors below take the matching projection type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeyView {
    Owner(OwnerPad),
    ThirdParty(TpKeyView),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyState {
    role: Role,
    id: String,
    key_material: KeyView,
    masked_set: Option<MaskedSet>,
    transcript: Vec<TranscriptEvent>,
}

impl PartyState {
    pub fn data_owner(id: &str, pad: OwnerPad, masked_set: MaskedSet) -> Self {
        PartyState {
            role: Role::DataOwner,
            id: id.to_string(),
            key_material: KeyView::Owner(pad),
            masked_set: Some(masked_set),
            transcript: Vec::new(),
        }
    }

    pub fn third_party(id: &str, view: TpKeyView) -> Self {
        PartyState {
            role: Role::ThirdParty,
            id: id.to_string(),
            key_material: KeyView::ThirdParty(view),
            masked_set: None,
            transcript: Vec::new(),
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn key_material(&self) -> &KeyView {
        &self.key_material
    }

    pub fn masked_set(&self) -> Option<&MaskedSet> {
        self.masked_set.as_ref()
    }

    pub fn transcript(&self) -> &[TranscriptEvent] {
        &self.transcript
    }

    fn pad(&self) -> &OwnerPad {
        match &self.key_material {
            KeyView::Owner(p) => p,
            KeyView::ThirdParty(_) => unreachable!("third party has no pad"),
        }
    }

    fn xor_view(&self) -> &TpKeyView {
        match &self.key_material {
            KeyView::ThirdParty(v) => v,
            KeyView::Owner(_) => unreachable!("data owner holds no XOR relation"),
        }
    }
}

/// Decrypted two-bit result for one index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MembershipCode {
    Both,
    BOnly,
    AOnly,
    Neither,
}

/// `00 → Both`, `01 → BOnly`, `10 → AOnly`, `11 → Neither`.
pub fn classify_outcome(bits: [bool; 2]) -> MembershipCode {
    match bits {
        [false, false] => MembershipCode::Both,
        [false, true] => MembershipCode::BOnly,
        [true, false] => MembershipCode::AOnly,
        [true, true] => MembershipCode::Neither,
    }
}

/// Evaluates `CNOT(0→2) · CNOT(1→3)` on `enc_a ⊗ enc_b`: each qubit of the
/// A pair controls the matching qubit of the B pair.
pub fn evaluate_cnot_pair(enc_a: &StateVector, enc_b: &StateVector) -> Result<StateVector, StateError> {
    for s in [enc_a, enc_b] {
        if s.num_qubits() != 2 {
            return Err(StateError::DimensionMismatch { expected: 2, found: s.num_qubits() });
        }
    }
    let mut joint = enc_a.tensor(enc_b);
    joint.apply(Gate::cnot(0, 2))?;
    joint.apply(Gate::cnot(1, 3))?;
    Ok(joint)
}

/// `h1..h4` count results `00, 01, 10, 11` for one evaluated pair of users.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub h1: usize,
    pub h2: usize,
    pub h3: usize,
    pub h4: usize,
}

impl PairCounts {
    pub fn from_codes(codes: &[MembershipCode]) -> Self {
        let mut c = PairCounts::default();
        for code in codes {
            match code {
                MembershipCode::Both => c.h1 += 1,
                MembershipCode::BOnly => c.h2 += 1,
                MembershipCode::AOnly => c.h3 += 1,
                MembershipCode::Neither => c.h4 += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.h1 + self.h2 + self.h3 + self.h4
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    /// One entry per group, in group order.
    pub groups: Vec<PairCounts>,
    /// Indices where every group reported `00`.
    pub h1p: usize,
    /// Indices where some group reported anything but `11`.
    pub h2p: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCounters {
    /// `|Ψ⟩` qubits for `4q` key bits plus the encrypted item qubits, per
    /// group. Decoys, `δ` rounds and classical key establishment excluded.
    pub qubits_prepared_core: usize,
    pub qubits_prepared_total: usize,
    pub classical_bits_output: usize,
    pub messages_sent: usize,
}

impl ResourceCounters {
    fn add(&mut self, other: &ResourceCounters) {
        self.qubits_prepared_core += other.qubits_prepared_core;
        self.qubits_prepared_total += other.qubits_prepared_total;
        self.classical_bits_output += other.classical_bits_output;
        self.messages_sent += other.messages_sent;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeySourceKind {
    IdealOracle,
    SimulatedQkd,
}

/// Forced values, for reproducing fixed scenarios and for independence tests.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub multiplier: Option<u64>,
    /// One mask per group.
    pub masks: Option<Vec<BinaryMask>>,
    /// Per-group `(A pads, B pads)`, `q` pairs each. Replaces the pads from
    /// key generation after it has run.
    pub pads: Option<Vec<(Vec<KeyPair2>, Vec<KeyPair2>)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    /// `None` selects [`KeygenConfig::default_delta`].
    pub delta: Option<usize>,
    pub test_fraction: f64,
    pub error_threshold: f64,
    /// `None` means one decoy per payload qubit.
    pub decoys_per_message: Option<usize>,
    pub adversary: AdversaryStrategy,
    pub tp: TpBehavior,
    pub key_source: KeySourceKind,
    pub overrides: Overrides,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            delta: None,
            test_fraction: 0.125,
            error_threshold: 0.0,
            decoys_per_message: None,
            adversary: AdversaryStrategy::None,
            tp: TpBehavior::Honest,
            key_source: KeySourceKind::IdealOracle,
            overrides: Overrides::default(),
        }
    }
}

impl ProtocolConfig {
    fn keygen(&self, q: usize) -> KeygenConfig {
        KeygenConfig {
            q,
            delta: self.delta.unwrap_or_else(|| KeygenConfig::default_delta(q)),
            test_fraction: self.test_fraction,
            error_threshold: self.error_threshold,
            decoys_per_message: self.decoys_per_message,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AbortReason {
    Eavesdropping { link: String, report: ChannelReport },
    DishonestTp { test_error_rate: f64 },
    InsufficientKeyBits { available: usize, required: usize },
    NoTestRounds,
}

/// A session that stopped before producing any cardinality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolAbort {
    pub phase: Phase,
    pub group: usize,
    pub reason: AbortReason,
    pub keygen_report: Option<KeygenReport>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("at least two parties are required, got {0}")]
    TooFewParties(usize),
    #[error("set has modulus {found}, expected {expected}")]
    ModulusMismatch { expected: u64, found: u64 },
    #[error("decoys per message must be positive")]
    NoDecoys,
    #[error("invalid override: {0}")]
    InvalidOverride(&'static str),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("invalid key generation config: {0}")]
    KeygenConfig(&'static str),
    #[error("protocol aborted in {:?} (group {}): {:?}", .0.phase, .0.group, .0.reason)]
    Abort(alloc::boxed::Box<ProtocolAbort>),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Qotp(#[from] QotpError),
}

impl EngineError {
    pub fn is_abort(&self) -> bool {
        matches!(self, EngineError::Abort(_))
    }
}

fn abort(phase: Phase, group: usize, reason: AbortReason, keygen_report: Option<KeygenReport>) -> EngineError {
    EngineError::Abort(alloc::boxed::Box::new(ProtocolAbort { phase, group, reason, keygen_report }))
}

/// Per-group outcome of one two-user session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    /// Zero-based user indices `(A side, B side)`.
    pub members: (usize, usize),
    pub keygen: KeygenReport,
    /// Decoy checks on the A→TP and B→TP payload links.
    pub channels: [ChannelReport; 2],
    pub codes: Vec<MembershipCode>,
    pub counts: PairCounts,
    /// Indices whose decrypted result differs from the plaintext XOR.
    pub xor_mismatches: usize,
    pub resources: ResourceCounters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub parties: usize,
    pub q: u64,
    pub intersection_cardinality: usize,
    pub union_cardinality: usize,
    pub counts: OutcomeCounts,
    pub multiplier: u64,
    pub masked_sets: Vec<MaskedSet>,
    pub groups: Vec<GroupReport>,
    pub resources: ResourceCounters,
    pub transcript: Vec<TranscriptEvent>,
}

impl ProtocolResult {
    /// Total mismatches between decrypted results and plaintext XORs.
    pub fn xor_mismatches(&self) -> usize {
        self.groups.iter().map(|g| g.xor_mismatches).sum()
    }
}

/// Pairs users for the multiparty extension (zero-based indices).
///
/// Even `m`: `(0,1), (2,3), …`. Odd `m`: the same, with the last group
/// overlapping its predecessor, `(m−2, m−1)`, so every user is covered by
/// `⌈m/2⌉` groups.
pub fn make_groups(m: usize) -> Result<Vec<(usize, usize)>, EngineError> {
    if m < 2 {
        return Err(EngineError::TooFewParties(m));
    }
    let mut groups: Vec<(usize, usize)> = (0..m / 2).map(|g| (2 * g, 2 * g + 1)).collect();
    if m % 2 == 1 {
        groups.push((m - 2, m - 1));
    }
    Ok(groups)
}

fn party_name(i: usize) -> String {
    format!("A{}", i + 1)
}

fn quantum(phase: Phase, from: &str, to: &str, payload: usize, decoys: usize) -> TranscriptEvent {
    TranscriptEvent {
        phase,
        from: from.to_string(),
        to: to.to_string(),
        kind: EventKind::QuantumSequence { payload, decoys },
    }
}

fn announce(phase: Phase, from: &str, to: &str, what: &str, bits: usize) -> TranscriptEvent {
    TranscriptEvent {
        phase,
        from: from.to_string(),
        to: to.to_string(),
        kind: EventKind::Announcement { what: what.to_string(), bits },
    }
}

struct GroupInput<'a> {
    index: usize,
    members: (usize, usize),
    masked: (&'a MaskedSet, &'a MaskedSet),
    mask: BinaryMask,
    pads: Option<&'a (Vec<KeyPair2>, Vec<KeyPair2>)>,
    seed: u64,
}

struct GroupRun {
    report: GroupReport,
    transcript: Vec<TranscriptEvent>,
}

fn map_keygen_error(err: KeygenError, group: usize) -> EngineError {
    let phase = Phase::KeyGeneration;
    match err {
        KeygenError::AbortEavesdropping { link, report, keygen } => {
            abort(phase, group, AbortReason::Eavesdropping { link: format!("{link:?}"), report }, Some(*keygen))
        }
        KeygenError::AbortDishonestTp { report } => {
            abort(phase, group, AbortReason::DishonestTp { test_error_rate: report.test_error_rate }, Some(*report))
        }
        KeygenError::InsufficientKeyBits { available, required, report } => {
            abort(phase, group, AbortReason::InsufficientKeyBits { available, required }, Some(*report))
        }
        KeygenError::NoTestRounds => abort(phase, group, AbortReason::NoTestRounds, None),
        KeygenError::Config(msg) => EngineError::KeygenConfig(msg),
        KeygenError::Channel(e) => e.into(),
        KeygenError::State(e) => e.into(),
        KeygenError::MixedBasis(_) | KeygenError::Unmeasured(_) => {
            unreachable!("key generation only checks measured same-basis rounds")
        }
    }
}

/// One complete two-user session: key generation, encryption, decoy-guarded
/// transmission, CNOT evaluation, decryption, measurement and counting.
fn run_group(input: GroupInput<'_>, q: usize, config: &ProtocolConfig) -> Result<GroupRun, EngineError> {
    let mut rng = ChaCha20Rng::seed_from_u64(input.seed);
    let mut pool = QubitPool::new();
    let mut adversary = Adversary::new(config.adversary);
    let keygen_cfg = config.keygen(q);
    let (name_a, name_b) = (party_name(input.members.0), party_name(input.members.1));
    let mut transcript = Vec::new();

    // key generation
    let out = run_keygen(&mut pool, &keygen_cfg, &config.tp, &mut adversary, &mut rng)
        .map_err(|e| map_keygen_error(e, input.index))?;
    let rounds = keygen_cfg.rounds();
    let decoys = keygen_cfg.decoys();
    let kg = Phase::KeyGeneration;
    transcript.push(quantum(kg, "TP", &name_a, rounds, decoys));
    transcript.push(quantum(kg, "TP", &name_b, rounds, decoys));
    transcript.push(announce(kg, "TP", &name_a, "decoy positions and bases", 0));
    transcript.push(announce(kg, "TP", &name_b, "decoy positions and bases", 0));
    transcript.push(announce(kg, &name_a, "TP", "test round selection", out.report.test_rounds));
    transcript.push(announce(kg, "TP", &name_a, "test round outcomes", out.report.test_rounds));
    transcript.push(announce(kg, &name_a, "TP", "Z-basis rounds", rounds));
    transcript.push(announce(kg, &name_b, "TP", "Z-basis rounds", rounds));

    // three |Ψ⟩ qubits per key bit actually used
    let key_qubits = 3 * out.keys.len();
    let keys = match input.pads {
        Some((a, b)) => {
            if a.len() != q || b.len() != q {
                return Err(EngineError::InvalidOverride("pads need q pairs per user"));
            }
            SharedKeyMaterial::from_pairs(a, b)
        }
        None => out.keys,
    };

    let alice = PartyState::data_owner(&name_a, keys.owner_pad(Side::A), input.masked.0.clone());
    let bob = PartyState::data_owner(&name_b, keys.owner_pad(Side::B), input.masked.1.clone());
    let tp = PartyState::third_party("TP", keys.tp_view());
    drop(keys);

    // encoding
    let plain_a = prepare_item_bits(input.masked.0, &input.mask, Side::A)?;
    let plain_b = prepare_item_bits(input.masked.1, &input.mask, Side::B)?;

    // encryption and transmission
    let mut payload_reports = [ChannelReport { decoys_tested: 0, decoys_wrong: 0, error_rate: 0.0 }; 2];
    let mut received: Vec<Vec<QubitId>> = Vec::with_capacity(2);
    let mut payload_qubits = 0;
    let payload_decoys = config.decoys_per_message.unwrap_or(2 * q);
    for (slot, (owner, plain)) in [(&alice, &plain_a), (&bob, &plain_b)].into_iter().enumerate() {
        let mut qubits = Vec::with_capacity(2 * q);
        for (j, bits) in plain.iter().enumerate() {
            let pair = pool.alloc(StateVector::from_bits(bits)?);
            encrypt_qubits(&mut pool, &owner.pad().pair(j).as_pauli(), &pair)?;
            qubits.extend(pair);
        }
        payload_qubits += qubits.len();
        let (delivered, report) = send_with_decoys(&mut pool, &qubits, payload_decoys, &mut adversary, &mut rng)?;
        transcript.push(quantum(Phase::Evaluation, owner.id(), "TP", 2 * q, payload_decoys));
        transcript.push(announce(Phase::Evaluation, owner.id(), "TP", "decoy positions and bases", 0));
        if report.exceeds(config.error_threshold) {
            let link = format!("{}->TP", owner.id());
            return Err(abort(
                Phase::Evaluation,
                input.index,
                AbortReason::Eavesdropping { link, report },
                Some(out.report),
            ));
        }
        payload_reports[slot] = report;
        received.push(delivered);
    }

    // evaluation, decryption, measurement
    let view = tp.xor_view();
    let mut codes = Vec::with_capacity(q);
    let mut xor_mismatches = 0;
    for j in 0..q {
        let a = &received[0][2 * j..2 * j + 2];
        let b = &received[1][2 * j..2 * j + 2];
        pool.apply_cnot(a[0], b[0])?;
        pool.apply_cnot(a[1], b[1])?;
        let sk = {
            let x = view.xor_pair(j);
            derive_tp_decryption_key(x.alpha, x.beta)
        };
        decrypt_qubits(&mut pool, sk, b)?;
        let bits = [pool.measure(b[0], Basis::Z, &mut rng)?, pool.measure(b[1], Basis::Z, &mut rng)?];
        let expected = [plain_a[j][0] ^ plain_b[j][0], plain_a[j][1] ^ plain_b[j][1]];
        if bits != expected {
            xor_mismatches += 1;
        }
        codes.push(classify_outcome(bits));
    }

    let keygen_decoys = out.report.decoys_prepared;
    let resources = ResourceCounters {
        qubits_prepared_core: key_qubits + payload_qubits,
        qubits_prepared_total: out.report.qubits_prepared + keygen_decoys + payload_qubits + 2 * payload_decoys,
        classical_bits_output: 0,
        messages_sent: transcript.len(),
    };
    Ok(GroupRun {
        report: GroupReport {
            members: input.members,
            keygen: out.report,
            channels: payload_reports,
            counts: PairCounts::from_codes(&codes),
            codes,
            xor_mismatches,
            resources,
        },
        transcript,
    })
}

struct Prepared {
    q: u64,
    multiplier: u64,
    masked: Vec<MaskedSet>,
    groups: Vec<GroupRun>,
}

fn run_groups<R: Rng + ?Sized>(
    sets: &[PrivateSet],
    config: &ProtocolConfig,
    rng: &mut R,
) -> Result<Prepared, EngineError> {
    let groups = make_groups(sets.len())?;
    let q = sets[0].modulus();
    for s in sets {
        if s.modulus() != q {
            return Err(EngineError::ModulusMismatch { expected: q, found: s.modulus() });
        }
    }
    if config.decoys_per_message == Some(0) {
        return Err(EngineError::NoDecoys);
    }
    let o = &config.overrides;
    if o.masks.as_ref().is_some_and(|m| m.len() != groups.len()) {
        return Err(EngineError::InvalidOverride("one mask per group"));
    }
    if o.pads.as_ref().is_some_and(|p| p.len() != groups.len()) {
        return Err(EngineError::InvalidOverride("one pad pair per group"));
    }

    // all seeds are drawn up front so results do not depend on group order
    let source_seed: u64 = rng.gen();
    let group_seeds: Vec<u64> = groups.iter().map(|_| rng.gen()).collect();
    let source = match config.key_source {
        KeySourceKind::IdealOracle => KeySource::IdealOracle { seed: source_seed },
        KeySourceKind::SimulatedQkd => KeySource::SimulatedQkd { seed: source_seed },
    };

    let multiplier = match o.multiplier {
        Some(k) => k,
        None => draw_multiplier(&source, q)?,
    };
    let masked: Vec<MaskedSet> = sets.iter().map(|s| mask_set(s, multiplier)).collect::<Result<_, _>>()?;

    let mut runs = Vec::with_capacity(groups.len());
    for (index, &(a, b)) in groups.iter().enumerate() {
        let mask = match &o.masks {
            Some(m) => m[index].clone(),
            None => draw_mask(&source, q, index as u64),
        };
        let input = GroupInput {
            index,
            members: (a, b),
            masked: (&masked[a], &masked[b]),
            mask,
            pads: o.pads.as_ref().map(|p| &p[index]),
            seed: group_seeds[index],
        };
        runs.push(run_group(input, q as usize, config)?);
    }
    Ok(Prepared { q, multiplier, masked, groups: runs })
}

fn aggregate(groups: &[GroupReport], q: usize) -> (usize, usize) {
    let mut h1p = 0;
    let mut h2p = 0;
    for j in 0..q {
        if groups.iter().all(|g| g.codes[j] == MembershipCode::Both) {
            h1p += 1;
        }
        if groups.iter().any(|g| g.codes[j] != MembershipCode::Neither) {
            h2p += 1;
        }
    }
    (h1p, h2p)
}

fn finish(prepared: Prepared, parties: usize, intersection: Option<(usize, usize)>) -> ProtocolResult {
    let q = prepared.q as usize;
    let mut transcript = Vec::new();
    let mut resources = ResourceCounters::default();
    let mut groups = Vec::with_capacity(prepared.groups.len());
    for run in prepared.groups {
        transcript.extend(run.transcript);
        resources.add(&run.report.resources);
        groups.push(run.report);
    }
    let (h1p, h2p) = aggregate(&groups, q);
    let (intersection_cardinality, union_cardinality) = intersection.unwrap_or((h1p, h2p));
    for i in 0..parties {
        transcript.push(announce(Phase::Publication, "TP", &party_name(i), "intersection and union cardinality", 2));
    }
    resources.classical_bits_output = 2;
    resources.messages_sent += parties;
    ProtocolResult {
        parties,
        q: prepared.q,
        intersection_cardinality,
        union_cardinality,
        counts: OutcomeCounts { groups: groups.iter().map(|g| g.counts).collect(), h1p, h2p },
        multiplier: prepared.multiplier,
        masked_sets: prepared.masked,
        groups,
        resources,
        transcript,
    }
}

/// Two-party run. Cardinalities come straight from the counts:
/// intersection `h1`, union `h1 + h2 + h3`.
pub fn run_two_party<R: Rng + ?Sized>(
    set_a: &PrivateSet,
    set_b: &PrivateSet,
    config: &ProtocolConfig,
    rng: &mut R,
) -> Result<ProtocolResult, EngineError> {
    let prepared = run_groups(&[set_a.clone(), set_b.clone()], config, rng)?;
    let c = prepared.groups[0].report.counts;
    Ok(finish(prepared, 2, Some((c.h1, c.h1 + c.h2 + c.h3))))
}

/// `m`-party run over [`make_groups`]. Index `j` is in the intersection iff
/// every group reports `00` there, and in the union iff some group reports
/// anything other than `11`.
pub fn run_multi_party<R: Rng + ?Sized>(
    sets: &[PrivateSet],
    config: &ProtocolConfig,
    rng: &mut R,
) -> Result<ProtocolResult, EngineError> {
    let prepared = run_groups(sets, config, rng)?;
    Ok(finish(prepared, sets.len(), None))
}
