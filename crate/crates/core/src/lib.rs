//! Learning static fault trees from labeled Boolean observations.

pub mod dataset;
pub mod equivalence;
pub mod evo;
pub mod error;
pub mod galileo;
pub mod normal_form;
pub mod skeleton;
pub mod synth;
pub mod tree;

pub use dataset::{full_truth_table, BitTable, Dataset, Record, SplitSpec};
pub use equivalence::equivalent;
pub use evo::{run, EaConfig, Individual, Operator, Origin, RunResult, RunTrace, Selection, Termination};
pub use error::{DataError, FtError, ParseError, Result};
pub use normal_form::{from_normal_form, to_normal_form, Form, NormalForm};
pub use skeleton::{contains_skeleton, run_partial, Skeleton};
pub use tree::{FaultTree, Gate, GateKind, NodeId, Violation};
