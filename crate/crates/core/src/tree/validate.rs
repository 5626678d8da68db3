use std::collections::BTreeSet;
use std::fmt;

use super::{FaultTree, GateKind, NodeId};

/// One broken structural rule, naming the offending node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// The top event is not defined by any gate.
    MissingTop(NodeId),
    /// A gate lists its own output among its inputs.
    SelfLoop(NodeId),
    /// A gate input is neither a gate nor a basic event.
    UndefinedInput { gate: NodeId, input: NodeId },
    /// A node is declared both as a basic event and as a gate output.
    BasicEventIsGate(NodeId),
    /// The gate participates in a directed cycle.
    Cycle(NodeId),
    /// The node cannot be reached from the top event.
    Unreachable(NodeId),
    /// An `AtLeast(k)` gate with `k` outside `[1, max(n-1, 1)]`.
    Cardinality { gate: NodeId, k: u32, inputs: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingTop(n) => write!(f, "top event `{n}` has no gate"),
            Violation::SelfLoop(n) => write!(f, "self-loop at `{n}`"),
            Violation::UndefinedInput { gate, input } => {
                write!(f, "gate `{gate}` reads undefined node `{input}`")
            }
            Violation::BasicEventIsGate(n) => {
                write!(f, "`{n}` is both a basic event and a gate")
            }
            Violation::Cycle(n) => write!(f, "cycle through `{n}`"),
            Violation::Unreachable(n) => write!(f, "`{n}` is unreachable from the top event"),
            Violation::Cardinality { gate, k, inputs } => {
                write!(f, "gate `{gate}` has k={k} with {inputs} inputs")
            }
        }
    }
}

impl FaultTree {
    /// List every structural violation; empty iff the tree is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = BTreeSet::new();

        if !self.gates.contains_key(&self.top) {
            out.insert(Violation::MissingTop(self.top.clone()));
        }
        for be in &self.basic_events {
            if self.gates.contains_key(be) {
                out.insert(Violation::BasicEventIsGate(be.clone()));
            }
        }
        for (id, gate) in &self.gates {
            if gate.inputs.contains(id) {
                out.insert(Violation::SelfLoop(id.clone()));
            }
            for input in &gate.inputs {
                if !self.gates.contains_key(input) && !self.basic_events.contains(input) {
                    out.insert(Violation::UndefinedInput {
                        gate: id.clone(),
                        input: input.clone(),
                    });
                }
            }
            if let GateKind::AtLeast(k) = gate.kind {
                let n = gate.inputs.len();
                if k < 1 || k > GateKind::max_k(n) {
                    out.insert(Violation::Cardinality {
                        gate: id.clone(),
                        k,
                        inputs: n,
                    });
                }
            }
        }
        for id in self.cyclic_gates() {
            if !out.contains(&Violation::SelfLoop(id.clone())) {
                out.insert(Violation::Cycle(id));
            }
        }
        let live = self.descendants(&self.top);
        for id in self.gates.keys().chain(self.basic_events.iter()) {
            if !live.contains(id) {
                out.insert(Violation::Unreachable(id.clone()));
            }
        }
        out.into_iter().collect()
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Gates lying on a directed cycle (self-loops included), found as the
    /// non-trivial strongly connected components.
    fn cyclic_gates(&self) -> Vec<NodeId> {
        // Kahn's algorithm: whatever cannot be peeled off lies on or above a
        // cycle; keep only the nodes that can reach themselves.
        let ids: Vec<&NodeId> = self.gates.keys().collect();
        let mut remaining: BTreeSet<&NodeId> = ids.iter().copied().collect();
        loop {
            let leaves: Vec<&NodeId> = remaining
                .iter()
                .copied()
                .filter(|id| {
                    self.gates[*id]
                        .inputs
                        .iter()
                        .all(|i| !remaining.contains(i))
                })
                .collect();
            if leaves.is_empty() {
                break;
            }
            for l in leaves {
                remaining.remove(l);
            }
        }
        remaining
            .into_iter()
            .filter(|id| {
                self.gates[*id]
                    .inputs
                    .iter()
                    .filter(|i| self.gates.contains_key(*i))
                    .any(|i| self.descendants(i).contains(*id))
            })
            .cloned()
            .collect()
    }
}
