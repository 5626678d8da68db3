//! Genetic operators on fault trees.
//!
//! Every operator returns `None` when it is inapplicable to its input. The
//! skeleton-constrained variants share these code paths through a
//! [`Restriction`]; with the empty restriction the candidate pools, and
//! therefore the random draws, are exactly those of the plain operators.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::tree::{FaultTree, Gate, GateKind, NodeId};

/// The genetic operators, including the K/N extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    GCreate,
    GMutate,
    KNChange,
    GDelete,
    BeDisconnect,
    BeConnect,
    BeSwap,
    Crossover,
}

impl Operator {
    pub const ALL: [Operator; 8] = [
        Operator::GCreate,
        Operator::GMutate,
        Operator::KNChange,
        Operator::GDelete,
        Operator::BeDisconnect,
        Operator::BeConnect,
        Operator::BeSwap,
        Operator::Crossover,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operator::GCreate => "g_create",
            Operator::GMutate => "g_mutate",
            Operator::KNChange => "k_n_change",
            Operator::GDelete => "g_delete",
            Operator::BeDisconnect => "be_disconnect",
            Operator::BeConnect => "be_connect",
            Operator::BeSwap => "be_swap",
            Operator::Crossover => "crossover",
        }
    }

    /// Apply a unary operator. Crossover is binary and always yields `None`
    /// here.
    pub fn apply<R: Rng + ?Sized>(
        self,
        ft: &FaultTree,
        ctx: &OperatorContext,
        rng: &mut R,
    ) -> Option<FaultTree> {
        self.apply_restricted(ft, ctx, &Restriction::default(), rng)
    }

    pub(crate) fn apply_restricted<R: Rng + ?Sized>(
        self,
        ft: &FaultTree,
        ctx: &OperatorContext,
        fixed: &Restriction,
        rng: &mut R,
    ) -> Option<FaultTree> {
        match self {
            Operator::GCreate => g_create_in(ft, ctx, fixed, rng),
            Operator::GMutate => g_mutate_in(ft, ctx, fixed, rng),
            Operator::KNChange => k_n_change_in(ft, fixed, rng),
            Operator::GDelete => g_delete_in(ft, fixed, rng),
            Operator::BeDisconnect => be_disconnect_in(ft, fixed, rng),
            Operator::BeConnect => be_connect(ft, ctx, rng),
            Operator::BeSwap => be_swap_in(ft, fixed, rng),
            Operator::Crossover => None,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Operator::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| format!("unknown operator `{s}`"))
    }
}

/// What operators need to know beyond the tree itself.
#[derive(Debug, Clone)]
pub struct OperatorContext {
    /// Candidate basic events, `V \ {T}`, in dataset order.
    pub variables: Vec<NodeId>,
    /// Names fresh gates must avoid.
    pub reserved: BTreeSet<NodeId>,
    pub enable_kn: bool,
}

impl OperatorContext {
    pub fn new<I>(variables: I, top_variable: &NodeId, enable_kn: bool) -> Self
    where
        I: IntoIterator<Item = NodeId>,
    {
        let variables: Vec<NodeId> = variables.into_iter().filter(|v| v != top_variable).collect();
        let mut reserved: BTreeSet<NodeId> = variables.iter().cloned().collect();
        reserved.insert(top_variable.clone());
        OperatorContext {
            variables,
            reserved,
            enable_kn,
        }
    }
}

/// Nodes and edges operators must leave untouched.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Restriction {
    pub gates: BTreeSet<NodeId>,
    pub basic_events: BTreeSet<NodeId>,
    pub edges: BTreeSet<(NodeId, NodeId)>,
}

impl Restriction {
    fn fixed_edge(&self, parent: &NodeId, child: &NodeId) -> bool {
        !self.edges.is_empty() && self.edges.contains(&(parent.clone(), child.clone()))
    }

    fn fixed_node(&self, id: &NodeId) -> bool {
        self.gates.contains(id) || self.basic_events.contains(id)
    }
}

fn pick<'a, T, R: Rng + ?Sized>(items: &'a [T], rng: &mut R) -> Option<&'a T> {
    items.choose(rng)
}

fn random_kind<R: Rng + ?Sized>(arity: usize, enable_kn: bool, rng: &mut R) -> GateKind {
    let choices = if enable_kn { 3 } else { 2 };
    match rng.gen_range(0..choices) {
        0 => GateKind::And,
        1 => GateKind::Or,
        _ => GateKind::AtLeast(rng.gen_range(1..=GateKind::max_k(arity))),
    }
}

/// Move a random nonempty proper subset of one gate's inputs under a new
/// gate of random kind.
pub fn g_create<R: Rng + ?Sized>(ft: &FaultTree, ctx: &OperatorContext, rng: &mut R) -> Option<FaultTree> {
    g_create_in(ft, ctx, &Restriction::default(), rng)
}

pub(crate) fn g_create_in<R: Rng + ?Sized>(
    ft: &FaultTree,
    ctx: &OperatorContext,
    fixed: &Restriction,
    rng: &mut R,
) -> Option<FaultTree> {
    let movable_of = |id: &NodeId, gate: &Gate| -> Vec<NodeId> {
        gate.inputs
            .iter()
            .filter(|i| !fixed.gates.contains(*i) && !fixed.fixed_edge(id, i))
            .cloned()
            .collect()
    };
    let eligible: Vec<&NodeId> = ft
        .gates()
        .iter()
        .filter(|(id, g)| g.inputs.len() >= 2 && !movable_of(id, g).is_empty())
        .map(|(id, _)| id)
        .collect();
    let target = (*pick(&eligible, rng)?).clone();
    let gate = &ft.gates()[&target];
    let movable = movable_of(&target, gate);
    let limit = gate.inputs.len() - 1;
    let subset: Vec<NodeId> = loop {
        let s: Vec<NodeId> = movable.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if !s.is_empty() && s.len() <= limit {
            break s;
        }
    };
    let kind = random_kind(subset.len(), ctx.enable_kn, rng);
    let name = ft.fresh_gate_name(&ctx.reserved);
    let mut child = ft.clone();
    let parent = child.gate_mut(&target)?;
    for input in &subset {
        parent.inputs.remove(input);
    }
    parent.inputs.insert(name.clone());
    child.insert_gate(name, Gate::new(kind, subset));
    child.tidy();
    Some(child)
}

/// Change the kind of one gate.
pub fn g_mutate<R: Rng + ?Sized>(ft: &FaultTree, ctx: &OperatorContext, rng: &mut R) -> Option<FaultTree> {
    g_mutate_in(ft, ctx, &Restriction::default(), rng)
}

pub(crate) fn g_mutate_in<R: Rng + ?Sized>(
    ft: &FaultTree,
    ctx: &OperatorContext,
    fixed: &Restriction,
    rng: &mut R,
) -> Option<FaultTree> {
    let pool: Vec<&NodeId> = ft.gates().keys().filter(|id| !fixed.gates.contains(*id)).collect();
    let target = (*pick(&pool, rng)?).clone();
    let gate = &ft.gates()[&target];
    let n = gate.inputs.len();
    let at_least = |rng: &mut R| GateKind::AtLeast(rng.gen_range(1..=GateKind::max_k(n)));
    let kind = match (gate.kind, ctx.enable_kn) {
        (GateKind::And, false) => GateKind::Or,
        (GateKind::Or, false) => GateKind::And,
        (GateKind::AtLeast(_), false) => {
            if rng.gen_bool(0.5) {
                GateKind::And
            } else {
                GateKind::Or
            }
        }
        (GateKind::And, true) => {
            if rng.gen_bool(0.5) {
                GateKind::Or
            } else {
                at_least(rng)
            }
        }
        (GateKind::Or, true) => {
            if rng.gen_bool(0.5) {
                GateKind::And
            } else {
                at_least(rng)
            }
        }
        (GateKind::AtLeast(_), true) => {
            if rng.gen_bool(0.5) {
                GateKind::And
            } else {
                GateKind::Or
            }
        }
    };
    let mut child = ft.clone();
    child.gate_mut(&target)?.kind = kind;
    Some(child)
}

/// Redraw the cardinality of one `AtLeast` gate with at least three inputs.
pub fn k_n_change<R: Rng + ?Sized>(ft: &FaultTree, rng: &mut R) -> Option<FaultTree> {
    k_n_change_in(ft, &Restriction::default(), rng)
}

pub(crate) fn k_n_change_in<R: Rng + ?Sized>(
    ft: &FaultTree,
    fixed: &Restriction,
    rng: &mut R,
) -> Option<FaultTree> {
    let pool: Vec<&NodeId> = ft
        .gates()
        .iter()
        .filter(|(id, g)| g.kind.is_at_least() && g.inputs.len() >= 3 && !fixed.gates.contains(*id))
        .map(|(id, _)| id)
        .collect();
    let target = (*pick(&pool, rng)?).clone();
    let gate = &ft.gates()[&target];
    let GateKind::AtLeast(k) = gate.kind else {
        return None;
    };
    let n = gate.inputs.len() as u32;
    // Uniform over [1, n-1] without k.
    let mut new_k = rng.gen_range(1..n - 1);
    if new_k >= k {
        new_k += 1;
    }
    let mut child = ft.clone();
    child.gate_mut(&target)?.kind = GateKind::AtLeast(new_k);
    Some(child)
}

/// Remove one non-top gate, hoisting its inputs into each of its parents.
pub fn g_delete<R: Rng + ?Sized>(ft: &FaultTree, rng: &mut R) -> Option<FaultTree> {
    g_delete_in(ft, &Restriction::default(), rng)
}

pub(crate) fn g_delete_in<R: Rng + ?Sized>(
    ft: &FaultTree,
    fixed: &Restriction,
    rng: &mut R,
) -> Option<FaultTree> {
    let pool: Vec<&NodeId> = ft
        .gates()
        .keys()
        .filter(|id| *id != ft.top() && !fixed.gates.contains(*id))
        .collect();
    let target = (*pick(&pool, rng)?).clone();
    let mut child = ft.clone();
    let removed = child.remove_gate(&target)?;
    for parent in ft.parents(&target) {
        let gate = child.gate_mut(&parent)?;
        gate.inputs.remove(&target);
        gate.inputs.extend(removed.inputs.iter().cloned());
    }
    child.tidy();
    Some(child)
}

/// Cut one edge between a basic event and one of its parents.
pub fn be_disconnect<R: Rng + ?Sized>(ft: &FaultTree, rng: &mut R) -> Option<FaultTree> {
    be_disconnect_in(ft, &Restriction::default(), rng)
}

pub(crate) fn be_disconnect_in<R: Rng + ?Sized>(
    ft: &FaultTree,
    fixed: &Restriction,
    rng: &mut R,
) -> Option<FaultTree> {
    if ft.basic_events().len() < 2 {
        return None;
    }
    let pool: Vec<&NodeId> = ft
        .basic_events()
        .iter()
        .filter(|b| !fixed.basic_events.contains(*b))
        .collect();
    let be = (*pick(&pool, rng)?).clone();
    let parents = ft.parents(&be);
    let parent = pick(&parents, rng)?;
    let mut child = ft.clone();
    child.gate_mut(parent)?.inputs.remove(&be);
    child.tidy();
    Some(child)
}

/// Attach one absent variable to a random gate.
pub fn be_connect<R: Rng + ?Sized>(ft: &FaultTree, ctx: &OperatorContext, rng: &mut R) -> Option<FaultTree> {
    let absent: Vec<&NodeId> = ctx
        .variables
        .iter()
        .filter(|v| !ft.is_basic_event(v) && !ft.is_gate(v))
        .collect();
    let be = (*pick(&absent, rng)?).clone();
    let gates: Vec<&NodeId> = ft.gates().keys().collect();
    let target = (*pick(&gates, rng)?).clone();
    let mut child = ft.clone();
    child.gate_mut(&target)?.inputs.insert(be.clone());
    child.insert_basic_event(be);
    Some(child)
}

/// Move one basic-event edge from a parent to a gate lacking that event.
pub fn be_swap<R: Rng + ?Sized>(ft: &FaultTree, rng: &mut R) -> Option<FaultTree> {
    be_swap_in(ft, &Restriction::default(), rng)
}

pub(crate) fn be_swap_in<R: Rng + ?Sized>(
    ft: &FaultTree,
    fixed: &Restriction,
    rng: &mut R,
) -> Option<FaultTree> {
    if ft.gate_count() < 2 {
        return None;
    }
    let destinations = |be: &NodeId| -> Vec<NodeId> {
        ft.gates()
            .iter()
            .filter(|(_, g)| !g.inputs.contains(be))
            .map(|(id, _)| id.clone())
            .collect()
    };
    let pool: Vec<&NodeId> = ft
        .basic_events()
        .iter()
        .filter(|b| !fixed.basic_events.contains(*b) && !destinations(b).is_empty())
        .collect();
    let be = (*pick(&pool, rng)?).clone();
    let parents = ft.parents(&be);
    let from = pick(&parents, rng)?.clone();
    let dests = destinations(&be);
    let to = pick(&dests, rng)?.clone();
    let mut child = ft.clone();
    child.gate_mut(&from)?.inputs.remove(&be);
    child.gate_mut(&to)?.inputs.insert(be);
    child.tidy();
    Some(child)
}

/// Swap a random subtree of `a` with a random subtree of `b`. Swap points
/// are non-top gates and basic events.
pub fn crossover<R: Rng + ?Sized>(
    a: &FaultTree,
    b: &FaultTree,
    ctx: &OperatorContext,
    rng: &mut R,
) -> Option<(FaultTree, FaultTree)> {
    crossover_in(a, b, ctx, &Restriction::default(), rng)
}

pub(crate) fn crossover_in<R: Rng + ?Sized>(
    a: &FaultTree,
    b: &FaultTree,
    ctx: &OperatorContext,
    fixed: &Restriction,
    rng: &mut R,
) -> Option<(FaultTree, FaultTree)> {
    let points = |ft: &FaultTree| -> Vec<NodeId> {
        ft.gates()
            .keys()
            .filter(|id| *id != ft.top())
            .chain(ft.basic_events())
            .filter(|id| !fixed.fixed_node(id))
            .cloned()
            .collect()
    };
    let pa = points(a);
    let pb = points(b);
    if pa.is_empty() || pb.is_empty() {
        return None;
    }
    let xa = pick(&pa, rng)?.clone();
    let xb = pick(&pb, rng)?.clone();
    let c1 = graft(a, &xa, b, &xb, ctx)?;
    let c2 = graft(b, &xb, a, &xa, ctx)?;
    Some((c1, c2))
}

/// `host` with every reference to `at` replaced by a copy of the subtree of
/// `donor` rooted at `root`. Copied gates whose names are taken in `host`
/// are renamed.
fn graft(
    host: &FaultTree,
    at: &NodeId,
    donor: &FaultTree,
    root: &NodeId,
    ctx: &OperatorContext,
) -> Option<FaultTree> {
    let mut child = host.clone();
    let subtree = donor.descendants(root);
    let mut rename: HashMap<NodeId, NodeId> = HashMap::new();
    let mut reserved = ctx.reserved.clone();
    for id in subtree.iter().filter(|id| donor.is_gate(id)) {
        let name = if host.is_gate(id) || host.is_basic_event(id) || reserved.contains(id) {
            host.fresh_gate_name(&reserved)
        } else {
            id.clone()
        };
        reserved.insert(name.clone());
        rename.insert(id.clone(), name);
    }
    let mapped = |id: &NodeId| rename.get(id).cloned().unwrap_or_else(|| id.clone());
    for id in subtree.iter() {
        if let Some(gate) = donor.gate(id) {
            child.insert_gate(
                mapped(id),
                Gate {
                    kind: gate.kind,
                    inputs: gate.inputs.iter().map(mapped).collect(),
                },
            );
        } else if host.is_gate(id) {
            // A donor basic event spelled like a host gate cannot be merged.
            return None;
        } else {
            child.insert_basic_event(id.clone());
            if let Some(&p) = donor.be_probabilities().get(id) {
                if !host.be_probabilities().contains_key(id) {
                    child.set_probability(id, p);
                }
            }
        }
    }
    let new_root = mapped(root);
    if &new_root != at {
        for parent in host.parents(at) {
            let gate = child.gate_mut(&parent)?;
            gate.inputs.remove(at);
            gate.inputs.insert(new_root.clone());
        }
    }
    child.tidy();
    Some(child)
}

/// For each node, the number of parent gates. Used to describe a tree's
/// basic-event wiring independently of gate names.
pub fn parent_counts(ft: &FaultTree) -> BTreeMap<NodeId, usize> {
    let mut counts = BTreeMap::new();
    for gate in ft.gates().values() {
        for input in &gate.inputs {
            *counts.entry(input.clone()).or_insert(0) += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(vars: &[&str]) -> OperatorContext {
        OperatorContext::new(vars.iter().map(|v| NodeId::new(v)), &NodeId::new("T"), false)
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Run `op` with successive seeds until `accept` holds.
    fn find<F, A>(mut op: F, accept: A) -> FaultTree
    where
        F: FnMut(&mut ChaCha8Rng) -> Option<FaultTree>,
        A: Fn(&FaultTree) -> bool,
    {
        for seed in 0..10_000 {
            if let Some(t) = op(&mut rng(seed)) {
                if accept(&t) {
                    return t;
                }
            }
        }
        panic!("no seed produced the expected tree");
    }

    #[test]
    fn g_create_fig7() {
        let before = FaultTree::single_gate("T", GateKind::And, ["B1", "B2", "B3", "B4"]);
        let c = ctx(&["B1", "B2", "B3", "B4"]);
        let expected = FaultTree::builder("T")
            .and("T", ["G1", "B3", "B4"])
            .or("G1", ["B1", "B2"])
            .build()
            .unwrap();
        let got = find(|r| g_create(&before, &c, r), |t| *t == expected);
        assert!(got.is_valid());
    }

    #[test]
    fn g_create_minimal_subset() {
        let before = FaultTree::single_gate("T", GateKind::And, ["A", "B"]);
        let got = g_create(&before, &ctx(&["A", "B"]), &mut rng(1)).unwrap();
        assert_eq!(got.gate_count(), 2);
        let inner = got.gates().iter().find(|(id, _)| id.as_str() != "T").unwrap().1;
        assert_eq!(inner.inputs.len(), 1);
        assert!(got.is_valid());
    }

    #[test]
    fn g_create_needs_two_inputs() {
        let before = FaultTree::single_gate("T", GateKind::And, ["A"]);
        assert!(g_create(&before, &ctx(&["A"]), &mut rng(0)).is_none());
    }

    #[test]
    fn fresh_gate_names_avoid_variables() {
        let before = FaultTree::single_gate("T", GateKind::And, ["G1", "B"]);
        let got = g_create(&before, &ctx(&["G1", "B", "G2"]), &mut rng(0)).unwrap();
        assert!(got.is_gate("G3"));
    }

    #[test]
    fn g_mutate_fig8() {
        let before = FaultTree::builder("T")
            .and("T", ["G1", "G2"])
            .and("G1", ["B1", "B2"])
            .or("G2", ["B3", "B4"])
            .build()
            .unwrap();
        let expected = FaultTree::builder("T")
            .and("T", ["G1", "G2"])
            .or("G1", ["B1", "B2"])
            .or("G2", ["B3", "B4"])
            .build()
            .unwrap();
        find(|r| g_mutate(&before, &ctx(&["B1", "B2", "B3", "B4"]), r), |t| *t == expected);
    }

    #[test]
    fn g_mutate_single_gate() {
        let before = FaultTree::single_gate("T", GateKind::And, ["A", "B"]);
        let got = g_mutate(&before, &ctx(&["A", "B"]), &mut rng(3)).unwrap();
        assert_eq!(got, FaultTree::single_gate("T", GateKind::Or, ["A", "B"]));
    }

    #[test]
    fn g_mutate_with_kn_draws_valid_cardinality() {
        let before = FaultTree::single_gate("T", GateKind::And, ["A", "B", "C", "D"]);
        let mut c = ctx(&["A", "B", "C", "D"]);
        c.enable_kn = true;
        let mut seen = BTreeSet::new();
        for seed in 0..200 {
            let got = g_mutate(&before, &c, &mut rng(seed)).unwrap();
            let kind = got.gates()["T"].kind;
            assert_ne!(kind, GateKind::And);
            if let GateKind::AtLeast(k) = kind {
                assert!((1..=3).contains(&k));
            }
            seen.insert(kind.to_string());
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn k_n_change_cases() {
        let three = FaultTree::single_gate("T", GateKind::AtLeast(2), ["A", "B", "C"]);
        let got = k_n_change(&three, &mut rng(0)).unwrap();
        assert_eq!(got.gates()["T"].kind, GateKind::AtLeast(1));
        let two = FaultTree::single_gate("T", GateKind::AtLeast(1), ["A", "B"]);
        assert!(k_n_change(&two, &mut rng(0)).is_none());
        assert!(k_n_change(&FaultTree::single_gate("T", GateKind::Or, ["A", "B", "C"]), &mut rng(0)).is_none());
    }

    #[test]
    fn g_delete_fig9() {
        let before = FaultTree::builder("T")
            .and("T", ["G", "B3", "B4"])
            .or("G", ["B1", "B2"])
            .build()
            .unwrap();
        let got = g_delete(&before, &mut rng(0)).unwrap();
        assert_eq!(got, FaultTree::single_gate("T", GateKind::And, ["B1", "B2", "B3", "B4"]));
        assert!(g_delete(&got, &mut rng(0)).is_none());
    }

    #[test]
    fn g_delete_empty_gate() {
        let before = FaultTree::builder("T")
            .and("T", ["G", "B1"])
            .gate("G", GateKind::Or, Vec::<&str>::new())
            .build_unchecked();
        let got = g_delete(&before, &mut rng(0)).unwrap();
        assert_eq!(got, FaultTree::single_gate("T", GateKind::And, ["B1"]));
    }

    #[test]
    fn be_disconnect_fig10() {
        let before = FaultTree::builder("T")
            .and("T", ["G", "B1"])
            .or("G", ["B2", "B3", "B4"])
            .build()
            .unwrap();
        let expected = FaultTree::builder("T")
            .and("T", ["G", "B1"])
            .or("G", ["B2", "B3"])
            .build()
            .unwrap();
        find(|r| be_disconnect(&before, r), |t| *t == expected);
    }

    #[test]
    fn be_disconnect_shared_event_stays() {
        let before = FaultTree::builder("T")
            .and("T", ["G", "A"])
            .or("G", ["A", "B"])
            .build()
            .unwrap();
        let got = find(|r| be_disconnect(&before, r), |t| t.gates()["G"].inputs.len() == 1 && t.gates()["G"].inputs.contains("B"));
        assert!(got.is_basic_event("A"));
        assert_eq!(got.parents("A").len(), 1);
    }

    #[test]
    fn be_disconnect_keeps_last_event() {
        let before = FaultTree::single_gate("T", GateKind::Or, ["A"]);
        assert!(be_disconnect(&before, &mut rng(0)).is_none());
    }

    #[test]
    fn be_connect_fig11() {
        let before = FaultTree::builder("T")
            .and("T", ["G", "B1"])
            .or("G", ["B2", "B3"])
            .build()
            .unwrap();
        let expected = FaultTree::builder("T")
            .and("T", ["G", "B1"])
            .or("G", ["B2", "B3", "B4"])
            .build()
            .unwrap();
        let c = ctx(&["B1", "B2", "B3", "B4", "T"]);
        find(|r| be_connect(&before, &c, r), |t| *t == expected);
        let full = ctx(&["B1", "B2", "B3"]);
        assert!(be_connect(&before, &full, &mut rng(0)).is_none());
    }

    #[test]
    fn be_swap_fig12() {
        let before = FaultTree::builder("T")
            .and("T", ["G", "B1"])
            .or("G", ["B2", "B3", "B4"])
            .build()
            .unwrap();
        let expected = FaultTree::builder("T")
            .and("T", ["G", "B1", "B4"])
            .or("G", ["B2", "B3"])
            .build()
            .unwrap();
        find(|r| be_swap(&before, r), |t| *t == expected);
        assert!(be_swap(&FaultTree::single_gate("T", GateKind::Or, ["A", "B"]), &mut rng(0)).is_none());
    }

    #[test]
    fn be_swap_skips_full_destinations() {
        // A is in every gate, so only B can move.
        let before = FaultTree::builder("T")
            .and("T", ["G", "A"])
            .or("G", ["A", "B"])
            .build()
            .unwrap();
        for seed in 0..50 {
            let got = be_swap(&before, &mut rng(seed)).unwrap();
            assert_eq!(got.parents("A").len(), 2);
            assert_eq!(got.parents("B"), vec![NodeId::new("T")]);
        }
    }

    #[test]
    fn crossover_fig13() {
        let a = FaultTree::builder("T")
            .and("T", ["G1", "G2"])
            .and("G1", ["B2", "B3"])
            .or("G2", ["B4", "B5"])
            .build()
            .unwrap();
        let b = FaultTree::builder("T")
            .or("T", ["B1", "G1"])
            .and("G1", ["B3", "B4"])
            .build()
            .unwrap();
        let c = ctx(&["B1", "B2", "B3", "B4", "B5"]);
        let expected_c = FaultTree::builder("T")
            .and("T", ["B1", "G2"])
            .or("G2", ["B4", "B5"])
            .build()
            .unwrap();
        let expected_d = FaultTree::builder("T")
            .or("T", ["G1", "G2"])
            .and("G1", ["B3", "B4"])
            .and("G2", ["B2", "B3"])
            .build()
            .unwrap();
        let mut found = false;
        for seed in 0..10_000 {
            if let Some((x, y)) = crossover(&a, &b, &c, &mut rng(seed)) {
                if x == expected_c {
                    assert_eq!(y, expected_d);
                    found = true;
                    break;
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn self_crossover_at_same_node_is_identity_up_to_names() {
        let a = FaultTree::builder("T")
            .and("T", ["G1", "G2"])
            .and("G1", ["B2", "B3"])
            .or("G2", ["B4", "B5"])
            .build()
            .unwrap();
        let c = ctx(&["B2", "B3", "B4", "B5"]);
        for seed in 0..200 {
            let (x, y) = crossover(&a, &a, &c, &mut rng(seed)).unwrap();
            assert!(x.is_valid() && y.is_valid());
        }
        // Swapping G1 with itself: the copy is renamed and the original
        // pruned.
        let g1 = NodeId::new("G1");
        let x = graft(&a, &g1, &a, &g1, &c).unwrap();
        assert!(x.equivalent_to(&a).unwrap());
        assert_eq!(x.gate_count(), 3);
    }

    #[test]
    fn crossover_without_swap_points() {
        let a = FaultTree::single_gate("T", GateKind::Or, Vec::<&str>::new());
        let b = FaultTree::single_gate("T", GateKind::Or, ["A"]);
        assert!(crossover(&a, &b, &ctx(&["A"]), &mut rng(0)).is_none());
    }

    #[test]
    fn operator_names_round_trip() {
        for op in Operator::ALL {
            assert_eq!(op.name().parse::<Operator>().unwrap(), op);
        }
    }
}
