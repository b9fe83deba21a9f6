//! Classical ground truth for cardinalities.

use std::collections::BTreeSet;

use qpsi_core::encoding::PrivateSet;
use serde::Serialize;

/// `(|∩ S_i|, |∪ S_i|)` by direct set folding. An empty list gives `(0, 0)`.
pub fn classical_oracle(sets: &[PrivateSet]) -> (usize, usize) {
    let Some((first, rest)) = sets.split_first() else {
        return (0, 0);
    };
    let intersection =
        rest.iter().fold(first.elements().clone(), |acc, s| acc.intersection(s.elements()).copied().collect());
    let union: BTreeSet<u64> = sets.iter().flat_map(|s| s.elements().iter().copied()).collect();
    (intersection.len(), union.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleCheck {
    pub intersection_cardinality: usize,
    pub union_cardinality: usize,
    pub agrees: bool,
}

impl OracleCheck {
    pub fn compare(sets: &[PrivateSet], intersection: usize, union: usize) -> Self {
        let (i, u) = classical_oracle(sets);
        OracleCheck { intersection_cardinality: i, union_cardinality: u, agrees: (i, u) == (intersection, union) }
    }
}
