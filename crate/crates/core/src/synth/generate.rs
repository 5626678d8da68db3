use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{FtError, Result};
use crate::tree::{CompiledTree, FaultTree, Gate, GateKind, NodeId};

/// Gate kinds a generator may draw. `AtLeast` gets a uniform cardinality
/// in `[1, N-1]` once its arity is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindTag {
    And,
    Or,
    AtLeast,
}

/// Shape of a random fault tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub num_bes: usize,
    pub num_gates: usize,
    pub kinds: Vec<KindTag>,
    pub be_prob_range: (f64, f64),
    pub seed: u64,
}

impl GenSpec {
    /// AND/OR trees with probabilities in `[0.05, 0.5]`.
    pub fn new(num_bes: usize, num_gates: usize, seed: u64) -> Self {
        GenSpec {
            num_bes,
            num_gates,
            kinds: vec![KindTag::And, KindTag::Or],
            be_prob_range: (0.05, 0.5),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(FtError::Input(m));
        if self.num_bes < 2 {
            return fail(format!("need at least 2 basic events, got {}", self.num_bes));
        }
        if self.num_gates == 0 {
            return fail("need at least one gate".into());
        }
        // n gates with at least two inputs each need 2n edges; a tree over
        // them supplies n - 1 gate edges, the basic events the rest.
        if self.num_bes < self.num_gates + 1 {
            return fail(format!(
                "{} gates of arity >= 2 need at least {} basic events, got {}",
                self.num_gates,
                self.num_gates + 1,
                self.num_bes
            ));
        }
        if self.kinds.is_empty() {
            return fail("no gate kinds allowed".into());
        }
        let (lo, hi) = self.be_prob_range;
        if !(0.0 < lo && lo <= hi && hi < 1.0) {
            return fail(format!("probability range [{lo}, {hi}] must satisfy 0 < lo <= hi < 1"));
        }
        Ok(())
    }
}

const SHAPE_ATTEMPTS: usize = 10_000;

/// A random tree with top `T`, gates `G1..`, basic events `B1..`. Each gate
/// beyond the first hangs under a uniformly chosen earlier gate; basic
/// events are spread uniformly and then moved to gates short of two inputs.
pub fn generate_ft(spec: &GenSpec) -> Result<FaultTree> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let g = spec.num_gates;
    let gate_names: Vec<NodeId> = (0..g)
        .map(|i| if i == 0 { NodeId::new("T") } else { NodeId::new(&format!("G{i}")) })
        .collect();
    let be_names: Vec<NodeId> = (1..=spec.num_bes).map(|i| NodeId::new(&format!("B{i}"))).collect();

    for _ in 0..SHAPE_ATTEMPTS {
        let parents: Vec<usize> = (1..g).map(|i| rng.gen_range(0..i)).collect();
        let mut gate_children = vec![0usize; g];
        for &p in &parents {
            gate_children[p] += 1;
        }
        let mut be_parent: Vec<usize> = (0..spec.num_bes).map(|_| rng.gen_range(0..g)).collect();
        if !repair(&mut be_parent, &gate_children, &mut rng) {
            continue;
        }

        let mut inputs: Vec<Vec<NodeId>> = vec![Vec::new(); g];
        for (i, &p) in parents.iter().enumerate() {
            inputs[p].push(gate_names[i + 1].clone());
        }
        for (b, &p) in be_parent.iter().enumerate() {
            inputs[p].push(be_names[b].clone());
        }
        let mut gates = BTreeMap::new();
        for (i, ins) in inputs.into_iter().enumerate() {
            let kind = match spec.kinds[rng.gen_range(0..spec.kinds.len())] {
                KindTag::And => GateKind::And,
                KindTag::Or => GateKind::Or,
                KindTag::AtLeast => GateKind::AtLeast(rng.gen_range(1..=GateKind::max_k(ins.len()))),
            };
            gates.insert(gate_names[i].clone(), Gate::new(kind, ins));
        }
        let (lo, hi) = spec.be_prob_range;
        let probabilities = be_names
            .iter()
            .map(|b| (b.clone(), if lo == hi { lo } else { rng.gen_range(lo..=hi) }))
            .collect();
        let ft = FaultTree::from_parts(
            gate_names[0].clone(),
            gates,
            be_names.iter().cloned().collect(),
            probabilities,
        );
        debug_assert!(ft.is_valid(), "{:?}", ft.validate());
        return Ok(ft);
    }
    Err(FtError::Input(format!(
        "could not shape {} gates over {} basic events",
        g, spec.num_bes
    )))
}

/// Move basic events from gates with spare inputs to gates with fewer than
/// two. Returns false when no donor is left.
fn repair<R: Rng + ?Sized>(be_parent: &mut [usize], gate_children: &[usize], rng: &mut R) -> bool {
    let arity = |be_parent: &[usize], gate: usize| {
        gate_children[gate] + be_parent.iter().filter(|&&p| p == gate).count()
    };
    loop {
        let Some(needy) = (0..gate_children.len()).find(|&gi| arity(be_parent, gi) < 2) else {
            return true;
        };
        let donors: Vec<usize> = (0..be_parent.len())
            .filter(|&b| be_parent[b] != needy && arity(be_parent, be_parent[b]) > 2)
            .collect();
        match donors.choose(rng) {
            Some(&b) => be_parent[b] = needy,
            None => return false,
        }
    }
}

/// `num_records` observations with each basic event failing independently
/// at its probability and the top column computed by `ft`.
pub fn sample_dataset(ft: &FaultTree, num_records: u64, seed: u64) -> Result<Dataset> {
    let bes: Vec<NodeId> = ft.basic_events().iter().cloned().collect();
    let probs: Vec<f64> = bes
        .iter()
        .map(|b| {
            ft.be_probabilities()
                .get(b)
                .copied()
                .ok_or_else(|| FtError::Input(format!("basic event `{b}` has no probability")))
        })
        .collect::<Result<_>>()?;
    let compiled = CompiledTree::compile(ft, |id| bes.binary_search(id).ok())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<Vec<bool>, u64> = BTreeMap::new();
    let mut columns = vec![vec![0u64; 1]; bes.len()];
    let mut scratch = Vec::new();
    let mut remaining = num_records;
    while remaining > 0 {
        let block = remaining.min(64) as usize;
        for (col, &p) in columns.iter_mut().zip(&probs) {
            let mut word = 0u64;
            for bit in 0..block {
                if rng.gen_bool(p) {
                    word |= 1 << bit;
                }
            }
            col[0] = word;
        }
        let top = compiled.eval_word(&columns, 0, &mut scratch);
        for bit in 0..block {
            let mut values: Vec<bool> = columns.iter().map(|c| c[0] >> bit & 1 == 1).collect();
            values.push(top >> bit & 1 == 1);
            *counts.entry(values).or_insert(0) += 1;
        }
        remaining -= block as u64;
    }
    let mut variables = bes;
    variables.push(ft.top().clone());
    Dataset::new(variables, ft.top().as_str(), counts)
}
