//! Inputs shared by the benchmarks.

use ftevolve_core::synth::{generate_ft, GenSpec, KindTag};
use ftevolve_core::{full_truth_table, Dataset, FaultTree};

pub const LAMP_CSV: &str = include_str!("../../../data/lamp.csv");

pub fn lamp_data() -> Dataset {
    Dataset::from_csv(LAMP_CSV, "T").expect("bundled dataset parses")
}

/// A generated tree with all three gate kinds and its complete truth table.
pub fn generated_case(num_bes: usize, num_gates: usize, seed: u64) -> (FaultTree, Dataset) {
    let mut spec = GenSpec::new(num_bes, num_gates, seed);
    spec.kinds = vec![KindTag::And, KindTag::Or, KindTag::AtLeast];
    let ft = generate_ft(&spec).expect("feasible spec");
    let data = full_truth_table(&ft).expect("small enough to enumerate");
    (ft, data)
}
