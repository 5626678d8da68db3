//! Learning under an expert-provided partial tree that every individual
//! must contain verbatim.

use rand::Rng;

use crate::dataset::Dataset;
use crate::error::{FtError, Result};
use crate::evo::operators::{
    be_disconnect_in, be_swap_in, crossover_in, g_create_in, g_delete_in, g_mutate_in,
    k_n_change_in, Restriction,
};
use crate::evo::{EaConfig, Engine, Individual, Operator, OperatorContext, RunResult};
use crate::tree::{FaultTree, NodeId};

/// A partial fault tree. Its gates may have fewer than two inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton {
    ft: FaultTree,
    fixed: Restriction,
}

impl Skeleton {
    pub fn new(ft: FaultTree) -> Result<Self> {
        let violations = ft.validate();
        if let Some(v) = violations.first() {
            return Err(FtError::InvalidTree(format!("skeleton: {v}")));
        }
        let fixed = Restriction {
            gates: ft.gates().keys().cloned().collect(),
            basic_events: ft.basic_events().clone(),
            edges: ft
                .gates()
                .iter()
                .flat_map(|(out, g)| g.inputs.iter().map(move |i| (out.clone(), i.clone())))
                .collect(),
        };
        Ok(Skeleton { ft, fixed })
    }

    pub fn ft(&self) -> &FaultTree {
        &self.ft
    }

    /// Check the skeleton fits a dataset: same top event, basic events
    /// among the other variables, gate names distinct from variables.
    pub fn check_variables(&self, variables: &[NodeId], top: &NodeId) -> Result<()> {
        if self.ft.top() != top {
            return Err(FtError::Input(format!(
                "skeleton top `{}` differs from the data's top variable `{top}`",
                self.ft.top()
            )));
        }
        for be in self.ft.basic_events() {
            if be == top || !variables.contains(be) {
                return Err(FtError::Input(format!(
                    "skeleton basic event `{be}` is not a variable of the data"
                )));
            }
        }
        for gate in self.ft.gates().keys().filter(|g| *g != top) {
            if variables.contains(gate) {
                return Err(FtError::Input(format!(
                    "skeleton gate `{gate}` is named like a data variable"
                )));
            }
        }
        Ok(())
    }
}

/// True iff `ft` has the skeleton's top, every skeleton gate with the same
/// kind, and every skeleton edge. Extra nodes and edges are allowed.
pub fn contains_skeleton(ft: &FaultTree, skeleton: &Skeleton) -> bool {
    let sk = &skeleton.ft;
    ft.top() == sk.top()
        && sk.basic_events().iter().all(|b| ft.is_basic_event(b))
        && sk.gates().iter().all(|(id, g)| {
            ft.gate(id)
                .is_some_and(|mine| mine.kind == g.kind && g.inputs.is_subset(&mine.inputs))
        })
}

/// The single-member initial population.
pub fn seed_population_o(skeleton: &Skeleton, variables: &[NodeId], top: &NodeId) -> Result<Vec<FaultTree>> {
    skeleton.check_variables(variables, top)?;
    Ok(vec![skeleton.ft.clone()])
}

pub fn g_create_o<R: Rng + ?Sized>(
    ft: &FaultTree,
    ctx: &OperatorContext,
    skeleton: &Skeleton,
    rng: &mut R,
) -> Option<FaultTree> {
    g_create_in(ft, ctx, &skeleton.fixed, rng)
}

pub fn g_mutate_o<R: Rng + ?Sized>(
    ft: &FaultTree,
    ctx: &OperatorContext,
    skeleton: &Skeleton,
    rng: &mut R,
) -> Option<FaultTree> {
    g_mutate_in(ft, ctx, &skeleton.fixed, rng)
}

pub fn k_n_change_o<R: Rng + ?Sized>(ft: &FaultTree, skeleton: &Skeleton, rng: &mut R) -> Option<FaultTree> {
    k_n_change_in(ft, &skeleton.fixed, rng)
}

pub fn g_delete_o<R: Rng + ?Sized>(ft: &FaultTree, skeleton: &Skeleton, rng: &mut R) -> Option<FaultTree> {
    g_delete_in(ft, &skeleton.fixed, rng)
}

pub fn be_disconnect_o<R: Rng + ?Sized>(ft: &FaultTree, skeleton: &Skeleton, rng: &mut R) -> Option<FaultTree> {
    be_disconnect_in(ft, &skeleton.fixed, rng)
}

pub fn be_swap_o<R: Rng + ?Sized>(ft: &FaultTree, skeleton: &Skeleton, rng: &mut R) -> Option<FaultTree> {
    be_swap_in(ft, &skeleton.fixed, rng)
}

/// Crossover avoiding skeleton nodes as swap points. Children that lose
/// part of the skeleton are replaced by `None`.
pub fn crossover_o<R: Rng + ?Sized>(
    a: &FaultTree,
    b: &FaultTree,
    ctx: &OperatorContext,
    skeleton: &Skeleton,
    rng: &mut R,
) -> Option<(Option<FaultTree>, Option<FaultTree>)> {
    let (x, y) = crossover_in(a, b, ctx, &skeleton.fixed, rng)?;
    let keep = |t: FaultTree| contains_skeleton(&t, skeleton).then_some(t);
    Some((keep(x), keep(y)))
}

/// Apply the constrained form of a unary operator.
pub fn apply_o<R: Rng + ?Sized>(
    op: Operator,
    ft: &FaultTree,
    ctx: &OperatorContext,
    skeleton: &Skeleton,
    rng: &mut R,
) -> Option<FaultTree> {
    op.apply_restricted(ft, ctx, &skeleton.fixed, rng)
}

/// Learn a tree containing `skeleton`, starting from the skeleton alone.
pub fn run_partial(train: &Dataset, skeleton: &Skeleton, cfg: &EaConfig) -> Result<RunResult> {
    run_partial_observed(train, skeleton, cfg, |_, _| {})
}

pub fn run_partial_observed<F>(
    train: &Dataset,
    skeleton: &Skeleton,
    cfg: &EaConfig,
    observer: F,
) -> Result<RunResult>
where
    F: FnMut(usize, &[Individual]),
{
    let seeds = seed_population_o(skeleton, train.variables(), train.top_variable())?;
    Engine {
        train,
        cfg,
        fixed: &skeleton.fixed,
        accept: &|ft| contains_skeleton(ft, skeleton),
    }
    .run(seeds, observer)
}
