//! Exhaustive truth-table comparison of fault trees.

use std::collections::BTreeSet;

use crate::error::{FtError, Result};
use crate::tree::{CompiledTree, FaultTree, NodeId};

/// Largest variable count [`equivalent`] will enumerate.
pub const MAX_EQUIVALENCE_VARIABLES: usize = 24;

const CHUNK_WORDS: usize = 1024;

/// Column words for variables `0..n` covering assignments
/// `[first_word * 64, (first_word + len) * 64)`, where bit `i` of the
/// assignment index is the value of variable `i`.
pub(crate) fn enumeration_columns(n: usize, first_word: usize, len: usize) -> Vec<Vec<u64>> {
    const LOW: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    (0..n)
        .map(|i| {
            (first_word..first_word + len)
                .map(|w| {
                    if i < 6 {
                        LOW[i]
                    } else if (w >> (i - 6)) & 1 == 1 {
                        !0
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect()
}

/// Mask of valid assignment bits in the last word when there are fewer than
/// 64 assignments.
pub(crate) fn tail_mask(n: usize) -> u64 {
    if n >= 6 {
        !0
    } else {
        (1u64 << (1 << n)) - 1
    }
}

/// True iff `a` and `b` agree on every assignment of the union of their
/// basic events. Events missing from one tree are free variables there.
pub fn equivalent(a: &FaultTree, b: &FaultTree) -> Result<bool> {
    let vars: Vec<NodeId> = a
        .basic_events()
        .iter()
        .chain(b.basic_events())
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if vars.len() > MAX_EQUIVALENCE_VARIABLES {
        return Err(FtError::Capacity {
            what: "variables for exhaustive equivalence",
            actual: vars.len(),
            limit: MAX_EQUIVALENCE_VARIABLES,
        });
    }
    let column_of = |id: &NodeId| vars.binary_search(id).ok();
    let ca = CompiledTree::compile(a, column_of)?;
    let cb = CompiledTree::compile(b, column_of)?;
    let n = vars.len();
    let total_words = if n >= 6 { 1usize << (n - 6) } else { 1 };
    let mask = tail_mask(n);
    let mut scratch = Vec::new();
    let mut start = 0;
    while start < total_words {
        let len = CHUNK_WORDS.min(total_words - start);
        let cols = enumeration_columns(n, start, len);
        for w in 0..len {
            let x = ca.eval_word(&cols, w, &mut scratch);
            let y = cb.eval_word(&cols, w, &mut scratch);
            if (x ^ y) & mask != 0 {
                return Ok(false);
            }
        }
        start += len;
    }
    Ok(true)
}

impl FaultTree {
    pub fn equivalent_to(&self, other: &FaultTree) -> Result<bool> {
        equivalent(self, other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::GateKind;

    #[test]
    fn and_differs_from_or() {
        let a = FaultTree::single_gate("T", GateKind::And, ["A", "B"]);
        let b = FaultTree::single_gate("T", GateKind::Or, ["A", "B"]);
        assert!(!equivalent(&a, &b).unwrap());
        assert!(equivalent(&a, &a).unwrap());
    }

    #[test]
    fn fig6_forms_are_equivalent() {
        let target = FaultTree::builder("T")
            .or("T", ["B1", "B2", "G1"])
            .or("G1", ["G2", "G3"])
            .and("G2", ["B3", "B4"])
            .and("G3", ["B5", "B6"])
            .build()
            .unwrap();
        let learnt = FaultTree::builder("T")
            .or("T", ["G1", "G2"])
            .or("G1", ["B1", "B2", "G3"])
            .and("G3", ["B3", "B4"])
            .and("G2", ["B5", "B6"])
            .build()
            .unwrap();
        assert!(equivalent(&target, &learnt).unwrap());
    }

    #[test]
    fn missing_event_is_free() {
        // OR(A) vs OR(A, B) differ when B alone is true.
        let a = FaultTree::single_gate("T", GateKind::Or, ["A"]);
        let b = FaultTree::single_gate("T", GateKind::Or, ["A", "B"]);
        assert!(!equivalent(&a, &b).unwrap());
    }

    #[test]
    fn enumeration_columns_match_index_bits() {
        let cols = enumeration_columns(8, 0, 4);
        for r in 0..256usize {
            for (i, col) in cols.iter().enumerate() {
                assert_eq!(col[r / 64] >> (r % 64) & 1 == 1, r >> i & 1 == 1);
            }
        }
    }

    #[test]
    fn capacity_limit() {
        let names: Vec<String> = (0..25).map(|i| format!("X{i}")).collect();
        let a = FaultTree::single_gate("T", GateKind::Or, names.iter().map(String::as_str));
        assert!(matches!(equivalent(&a, &a), Err(FtError::Capacity { .. })));
    }
}
