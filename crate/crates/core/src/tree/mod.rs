//! Fault-tree data model.
//!
//! A [`FaultTree`] is a DAG of typed gates over basic events with a single
//! top event. Gates are keyed by the intermediate event they define, and
//! every gate keeps its inputs in a sorted set so that iteration order (and
//! therefore serialization and every RNG-driven choice) is reproducible.

mod compiled;
mod eval;
mod validate;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{FtError, Result};

pub use compiled::CompiledTree;
pub use validate::Violation;

/// Name of a gate output or basic event. A basic event's id is its
/// variable name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(Arc<str>);

impl NodeId {
    pub fn new(name: &str) -> Self {
        NodeId(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(Arc::from(s))
    }
}

impl std::ops::Deref for NodeId {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// True for names accepted in files and datasets: `[A-Za-z0-9_]+`.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    And,
    Or,
    /// Fires when at least `k` inputs fire.
    AtLeast(u32),
}

impl GateKind {
    /// Largest admissible `k` for an `AtLeast` gate with `n` inputs.
    pub fn max_k(n: usize) -> u32 {
        (n.saturating_sub(1)).max(1) as u32
    }

    /// Clamp an `AtLeast` cardinality into `[1, max(n-1, 1)]`.
    pub fn clamped(self, n: usize) -> GateKind {
        match self {
            GateKind::AtLeast(k) => GateKind::AtLeast(k.clamp(1, GateKind::max_k(n))),
            other => other,
        }
    }

    pub fn is_at_least(self) -> bool {
        matches!(self, GateKind::AtLeast(_))
    }

    /// Value of a gate of this kind whose inputs have `true_count` of `n`
    /// inputs true. Empty gates are false; single-input gates pass through.
    pub fn fires(self, true_count: usize, n: usize) -> bool {
        match n {
            0 => false,
            1 => true_count == 1,
            _ => match self {
                GateKind::And => true_count == n,
                GateKind::Or => true_count >= 1,
                GateKind::AtLeast(k) => true_count >= k as usize,
            },
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::And => f.write_str("and"),
            GateKind::Or => f.write_str("or"),
            GateKind::AtLeast(k) => write!(f, "atleast{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: BTreeSet<NodeId>,
}

impl Gate {
    pub fn new<I, S>(kind: GateKind, inputs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<NodeId>,
    {
        Gate {
            kind,
            inputs: inputs.into_iter().map(Into::into).collect(),
        }
    }
}

/// A static fault tree `(BE, IE, T, G)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultTree {
    top: NodeId,
    gates: BTreeMap<NodeId, Gate>,
    basic_events: BTreeSet<NodeId>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    be_probabilities: BTreeMap<NodeId, f64>,
}

impl FaultTree {
    /// Assemble a tree without checking any invariant. Use
    /// [`FaultTree::validate`] to diagnose the result.
    pub fn from_parts(
        top: NodeId,
        gates: BTreeMap<NodeId, Gate>,
        basic_events: BTreeSet<NodeId>,
        be_probabilities: BTreeMap<NodeId, f64>,
    ) -> Self {
        FaultTree {
            top,
            gates,
            basic_events,
            be_probabilities,
        }
    }

    pub fn builder(top: &str) -> FaultTreeBuilder {
        FaultTreeBuilder {
            top: NodeId::new(top),
            gates: BTreeMap::new(),
            probabilities: BTreeMap::new(),
        }
    }

    /// A single gate of `kind` at the top over `inputs`.
    pub fn single_gate<I, S>(top: &str, kind: GateKind, inputs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<NodeId>,
    {
        let gate = Gate::new(kind, inputs);
        let basic_events = gate.inputs.clone();
        let top = NodeId::new(top);
        FaultTree {
            gates: BTreeMap::from([(top.clone(), gate)]),
            top,
            basic_events,
            be_probabilities: BTreeMap::new(),
        }
    }

    pub fn top(&self) -> &NodeId {
        &self.top
    }

    pub fn gates(&self) -> &BTreeMap<NodeId, Gate> {
        &self.gates
    }

    pub fn gate(&self, id: &str) -> Option<&Gate> {
        self.gates.get(id)
    }

    pub fn basic_events(&self) -> &BTreeSet<NodeId> {
        &self.basic_events
    }

    pub fn be_probabilities(&self) -> &BTreeMap<NodeId, f64> {
        &self.be_probabilities
    }

    pub fn is_gate(&self, id: &str) -> bool {
        self.gates.contains_key(id)
    }

    pub fn is_basic_event(&self, id: &str) -> bool {
        self.basic_events.contains(id)
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Total number of gate-input edges.
    pub fn edge_count(&self) -> usize {
        self.gates.values().map(|g| g.inputs.len()).sum()
    }

    /// Gates listing `id` among their inputs, in id order.
    pub fn parents(&self, id: &str) -> Vec<NodeId> {
        self.gates
            .iter()
            .filter(|(_, g)| g.inputs.contains(id))
            .map(|(k, _)| k.clone())
            .collect()
    }

    /// Map from every node to its parent gates.
    pub fn parent_map(&self) -> HashMap<NodeId, Vec<NodeId>> {
        let mut map: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for (out, gate) in &self.gates {
            for input in &gate.inputs {
                map.entry(input.clone()).or_default().push(out.clone());
            }
        }
        map
    }

    /// All gates and basic events reachable from `root` (inclusive).
    pub fn descendants(&self, root: &NodeId) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![root.clone()];
        while let Some(n) = stack.pop() {
            if !seen.insert(n.clone()) {
                continue;
            }
            if let Some(g) = self.gates.get(&n) {
                stack.extend(g.inputs.iter().cloned());
            }
        }
        seen
    }

    /// Gates ordered so that every gate appears after all gates it reads.
    pub fn topological_gates(&self) -> Result<Vec<NodeId>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        let mut marks: HashMap<&NodeId, Mark> = HashMap::new();
        let mut order = Vec::with_capacity(self.gates.len());
        for start in self.gates.keys() {
            if marks.contains_key(start) {
                continue;
            }
            // (node, next input index)
            let mut stack: Vec<(&NodeId, usize)> = vec![(start, 0)];
            marks.insert(start, Mark::Open);
            while let Some((node, idx)) = stack.pop() {
                let gate = &self.gates[node];
                if let Some(child) = gate.inputs.iter().nth(idx) {
                    stack.push((node, idx + 1));
                    if self.gates.contains_key(child) {
                        match marks.get(child) {
                            Some(Mark::Open) => {
                                return Err(FtError::InvalidTree(format!(
                                    "cycle through `{child}`"
                                )))
                            }
                            Some(Mark::Done) => {}
                            None => {
                                marks.insert(child, Mark::Open);
                                stack.push((child, 0));
                            }
                        }
                    }
                } else {
                    marks.insert(node, Mark::Done);
                    order.push(node.clone());
                }
            }
        }
        Ok(order)
    }

    /// A gate name of the form `G<n>` not used by this tree nor contained in
    /// `reserved`.
    pub fn fresh_gate_name(&self, reserved: &BTreeSet<NodeId>) -> NodeId {
        (1..)
            .map(|n| format!("G{n}"))
            .find(|name| {
                !self.gates.contains_key(name.as_str())
                    && !self.basic_events.contains(name.as_str())
                    && !reserved.contains(name.as_str())
                    && self.top.as_str() != name
            })
            .map(NodeId::from)
            .expect("unbounded name supply")
    }

    pub(crate) fn gate_mut(&mut self, id: &str) -> Option<&mut Gate> {
        self.gates.get_mut(id)
    }

    pub(crate) fn insert_gate(&mut self, id: NodeId, gate: Gate) {
        self.gates.insert(id, gate);
    }

    pub(crate) fn remove_gate(&mut self, id: &str) -> Option<Gate> {
        self.gates.remove(id)
    }

    pub(crate) fn insert_basic_event(&mut self, id: NodeId) {
        self.basic_events.insert(id);
    }

    pub fn set_probability(&mut self, be: &str, p: f64) {
        self.be_probabilities.insert(NodeId::new(be), p);
    }

    /// Drop nodes no longer reachable from the top and clamp `AtLeast`
    /// cardinalities to their current arity.
    pub(crate) fn tidy(&mut self) {
        let live = self.descendants(&self.top.clone());
        self.gates.retain(|id, _| live.contains(id));
        self.basic_events.retain(|id| live.contains(id));
        let bes = &self.basic_events;
        self.be_probabilities.retain(|id, _| bes.contains(id));
        for gate in self.gates.values_mut() {
            gate.kind = gate.kind.clamped(gate.inputs.len());
        }
    }
}

/// Incremental construction of a [`FaultTree`]. Inputs that are never
/// defined as gates become basic events.
#[derive(Debug, Clone)]
pub struct FaultTreeBuilder {
    top: NodeId,
    gates: BTreeMap<NodeId, Gate>,
    probabilities: BTreeMap<NodeId, f64>,
}

impl FaultTreeBuilder {
    pub fn gate<I, S>(mut self, name: &str, kind: GateKind, inputs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<NodeId>,
    {
        self.gates.insert(NodeId::new(name), Gate::new(kind, inputs));
        self
    }

    pub fn and<const N: usize>(self, name: &str, inputs: [&str; N]) -> Self {
        self.gate(name, GateKind::And, inputs)
    }

    pub fn or<const N: usize>(self, name: &str, inputs: [&str; N]) -> Self {
        self.gate(name, GateKind::Or, inputs)
    }

    pub fn at_least<const N: usize>(self, name: &str, k: u32, inputs: [&str; N]) -> Self {
        self.gate(name, GateKind::AtLeast(k), inputs)
    }

    pub fn probability(mut self, be: &str, p: f64) -> Self {
        self.probabilities.insert(NodeId::new(be), p);
        self
    }

    pub fn build_unchecked(self) -> FaultTree {
        let basic_events = self
            .gates
            .values()
            .flat_map(|g| g.inputs.iter())
            .filter(|n| !self.gates.contains_key(*n))
            .cloned()
            .collect();
        FaultTree::from_parts(self.top, self.gates, basic_events, self.probabilities)
    }

    /// Build and reject any invariant violation.
    pub fn build(self) -> Result<FaultTree> {
        let ft = self.build_unchecked();
        let violations = ft.validate();
        if violations.is_empty() {
            Ok(ft)
        } else {
            let msg: Vec<String> = violations.iter().map(ToString::to_string).collect();
            Err(FtError::InvalidTree(msg.join("; ")))
        }
    }
}
