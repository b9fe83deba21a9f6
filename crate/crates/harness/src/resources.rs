//! Qubit efficiency `η = x / (y + z)`: `x` output items (`q`), `y` quantum
//! resources excluding key establishment and eavesdropping checks, `z`
//! classical bits announced.

use num_rational::Ratio;
use qpsi_core::engine::ResourceCounters;
use serde::Serialize;

/// Core qubits of one two-user group: `12q` for the `4q` shared key bits
/// (three qubits each) plus `4q` encrypted item qubits.
pub const CORE_QUBITS_PER_ITEM: u64 = 16;

/// Classical bits announced: one intersection and one union cardinality.
pub const CLASSICAL_OUTPUT_BITS: u64 = 2;

pub fn group_count(m: u64) -> u64 {
    m.div_ceil(2)
}

pub fn expected_core_qubits(q: u64, m: u64) -> u64 {
    CORE_QUBITS_PER_ITEM * group_count(m) * q
}

/// `q / (16⌈m/2⌉q + 2)`.
pub fn qubit_efficiency(q: u64, m: u64) -> Ratio<u64> {
    Ratio::new(q, expected_core_qubits(q, m) + CLASSICAL_OUTPUT_BITS)
}

/// `q / (counted core qubits + counted output bits)`.
pub fn measured_efficiency(q: u64, counters: &ResourceCounters) -> Ratio<u64> {
    Ratio::new(q, (counters.qubits_prepared_core + counters.classical_bits_output) as u64)
}

pub fn verify_resources(counters: &ResourceCounters, q: u64, m: u64) -> bool {
    counters.qubits_prepared_core as u64 == expected_core_qubits(q, m)
        && counters.classical_bits_output as u64 == CLASSICAL_OUTPUT_BITS
        && counters.qubits_prepared_total >= counters.qubits_prepared_core
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyReport {
    pub parties: u64,
    pub formula: Ratio<u64>,
    pub measured: Ratio<u64>,
    pub formula_value: f64,
    pub expected_core_qubits: u64,
    pub counted_core_qubits: u64,
    pub matches: bool,
}

impl EfficiencyReport {
    pub fn new(q: u64, m: u64, counters: &ResourceCounters) -> Self {
        let formula = qubit_efficiency(q, m);
        let measured = measured_efficiency(q, counters);
        EfficiencyReport {
            parties: m,
            formula,
            measured,
            formula_value: *formula.numer() as f64 / *formula.denom() as f64,
            expected_core_qubits: expected_core_qubits(q, m),
            counted_core_qubits: counters.qubits_prepared_core as u64,
            matches: formula == measured && verify_resources(counters, q, m),
        }
    }
}
