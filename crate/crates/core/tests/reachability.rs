//! Every AND/OR tree over four events with at most two gates can be built
//! from the OR seed by a short script of single operator applications.

mod common;

use std::collections::BTreeSet;

use ftevolve_core::evo::{seed_population, Operator, OperatorContext};
use ftevolve_core::{FaultTree, GateKind, NodeId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::context;

const VARS: usize = 4;
const ATTEMPTS: u64 = 5000;

/// Structure with gate names erased.
fn shape(ft: &FaultTree, node: &NodeId) -> String {
    match ft.gates().get(node) {
        None => node.to_string(),
        Some(g) => {
            let mut parts: Vec<String> = g.inputs.iter().map(|i| shape(ft, i)).collect();
            parts.sort();
            format!("{}({})", g.kind, parts.join(","))
        }
    }
}

/// Apply `op` under successive RNG seeds until it yields `want`.
fn step(ft: &FaultTree, op: Operator, ctx: &OperatorContext, want: &str) -> FaultTree {
    for seed in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some(next) = op.apply(ft, ctx, &mut rng) {
            if shape(&next, next.top()) == want {
                return next;
            }
        }
    }
    panic!("{op} never turned {} into {want}", shape(ft, ft.top()));
}

fn names(set: &BTreeSet<usize>) -> Vec<String> {
    set.iter().map(|i| format!("B{i}")).collect()
}

fn subsets(pool: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let items: Vec<usize> = pool.iter().copied().collect();
    (1u32..1 << items.len())
        .map(|m| (0..items.len()).filter(|i| m >> i & 1 == 1).map(|i| items[i]).collect())
        .collect()
}

/// Script: drop unused events, split off the lower gate, then fix kinds.
fn build(target: &FaultTree, ctx: &OperatorContext) -> FaultTree {
    let top = &target.gates()[target.top()];
    let used: BTreeSet<NodeId> = target.basic_events().clone();
    let lower = top.inputs.iter().find(|i| target.is_gate(i)).cloned();
    let all: Vec<NodeId> = (1..=VARS).map(|i| NodeId::new(&format!("B{i}"))).collect();

    let variables: Vec<NodeId> = all.iter().cloned().chain([NodeId::new("T")]).collect();
    let seeds = seed_population(&variables, &NodeId::new("T")).unwrap();
    let mut ft = seeds
        .into_iter()
        .find(|s| s.gates()[s.top()].kind == GateKind::Or)
        .unwrap();
    let mut kept: Vec<NodeId> = all.clone();
    for v in all.iter().filter(|v| !used.contains(*v)) {
        kept.retain(|k| k != v);
        let mut names: Vec<String> = kept.iter().map(|k| k.to_string()).collect();
        names.sort();
        ft = step(&ft, Operator::BeDisconnect, ctx, &format!("or({})", names.join(",")));
    }
    if let Some(g) = &lower {
        let inner = &target.gates()[g];
        let mut inner_names: Vec<String> = inner.inputs.iter().map(|i| i.to_string()).collect();
        inner_names.sort();
        let mut outer: Vec<String> = top.inputs.iter().filter(|i| *i != g).map(|i| i.to_string()).collect();
        outer.push(format!("or({})", inner_names.join(",")));
        outer.sort();
        ft = step(&ft, Operator::GCreate, ctx, &format!("or({})", outer.join(",")));
        if inner.kind != GateKind::Or {
            outer.retain(|o| !o.starts_with("or("));
            outer.push(format!("and({})", inner_names.join(",")));
            outer.sort();
            ft = step(&ft, Operator::GMutate, ctx, &format!("or({})", outer.join(",")));
        }
    }
    if top.kind != GateKind::Or {
        ft = step(&ft, Operator::GMutate, ctx, &shape(target, target.top()));
    }
    ft
}

#[test]
fn every_small_and_or_tree_is_reachable() {
    let ctx = context(VARS, false);
    let universe: BTreeSet<usize> = (1..=VARS).collect();
    let kinds = [GateKind::And, GateKind::Or];
    let mut targets = Vec::new();
    for top_set in subsets(&universe) {
        for &k in &kinds {
            if top_set.len() >= 2 {
                targets.push(FaultTree::single_gate("T", k, names(&top_set)));
            }
            let rest: BTreeSet<usize> = universe.difference(&top_set).copied().collect();
            for low_set in subsets(&rest).into_iter().filter(|s| s.len() >= 2) {
                for &lk in &kinds {
                    let mut top_inputs = names(&top_set);
                    top_inputs.push("G1".into());
                    let t = FaultTree::builder("T")
                        .gate("T", k, top_inputs)
                        .gate("G1", lk, names(&low_set))
                        .build()
                        .unwrap();
                    targets.push(t);
                }
            }
        }
    }
    assert!(targets.len() > 50);
    for target in &targets {
        let built = build(target, &ctx);
        assert_eq!(shape(&built, built.top()), shape(target, target.top()));
        assert!(built.is_valid());
    }
}
