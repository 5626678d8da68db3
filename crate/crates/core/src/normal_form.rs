//! CNF / DNF reduction of monotone fault trees.
//!
//! Clauses are computed bottom-up over the gate DAG with distribution and
//! absorption applied at every step. `AtLeast(k)` gates are expanded through
//! the threshold recurrence `S[j] <- S[j] | (S[j-1] & x)`, which yields the
//! same clause set as the OR over all k-subsets of inputs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FtError, Result};
use crate::tree::{FaultTree, Gate, GateKind, NodeId};

/// Abort threshold on the number of clauses produced by one distribution.
pub const MAX_INTERMEDIATE_CLAUSES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Form {
    Cnf,
    Dnf,
}

impl std::str::FromStr for Form {
    type Err = FtError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cnf" => Ok(Form::Cnf),
            "dnf" => Ok(Form::Dnf),
            other => Err(FtError::Input(format!("unknown normal form `{other}`"))),
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Cnf => "cnf",
            Form::Dnf => "dnf",
        })
    }
}

/// A set of clauses over basic events. In CNF each clause is a disjunction
/// and the set is conjoined; DNF is the dual.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalForm {
    pub form: Form,
    pub clauses: BTreeSet<BTreeSet<NodeId>>,
}

impl NormalForm {
    /// Build from raw clauses, applying duplicate removal and absorption.
    pub fn new<C, L>(form: Form, clauses: C) -> Self
    where
        C: IntoIterator<Item = L>,
        L: IntoIterator,
        L::Item: Into<NodeId>,
    {
        let raw: Vec<BTreeSet<NodeId>> = clauses
            .into_iter()
            .map(|c| c.into_iter().map(Into::into).collect())
            .collect();
        let mut sorted = raw.clone();
        sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        sorted.dedup();
        let mut kept: Vec<BTreeSet<NodeId>> = Vec::new();
        for c in sorted {
            if !kept.iter().any(|k| k.is_subset(&c)) {
                kept.push(c);
            }
        }
        NormalForm {
            form,
            clauses: kept.into_iter().collect(),
        }
    }

    /// Truth value of the clause set under `lookup`; absent literals are
    /// false.
    pub fn evaluate_with<F: Fn(&NodeId) -> bool>(&self, lookup: F) -> bool {
        match self.form {
            Form::Dnf => self.clauses.iter().any(|c| c.iter().all(&lookup)),
            Form::Cnf => self.clauses.iter().all(|c| c.iter().any(&lookup)),
        }
    }

    pub fn literals(&self) -> BTreeSet<NodeId> {
        self.clauses.iter().flatten().cloned().collect()
    }

    /// One clause per line, literals separated by spaces, lines sorted.
    pub fn to_text(&self) -> String {
        let mut lines: Vec<String> = self
            .clauses
            .iter()
            .map(|c| c.iter().map(NodeId::as_str).collect::<Vec<_>>().join(" "))
            .collect();
        lines.sort();
        let mut out = String::new();
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }

    /// Materialize as a two-level tree rooted at `top_name`.
    pub fn to_fault_tree(&self, top_name: &str) -> Result<FaultTree> {
        from_normal_form(self, top_name)
    }
}

/// Clause over basic-event indices, stored as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Clause(Vec<u64>);

impl Clause {
    fn empty(words: usize) -> Self {
        Clause(vec![0; words])
    }

    fn unit(words: usize, idx: usize) -> Self {
        let mut c = Clause::empty(words);
        c.0[idx / 64] |= 1 << (idx % 64);
        c
    }

    fn union(&self, other: &Clause) -> Clause {
        Clause(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    fn is_disjoint_from(&self, other: &Clause) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == 0)
    }

    fn is_subset(&self, other: &Clause) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn len(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }
}

type ClauseSet = Vec<Clause>;

fn support(set: &ClauseSet) -> Clause {
    let words = set.first().map_or(0, |c| c.0.len());
    set.iter().fold(Clause::empty(words), |acc, c| acc.union(c))
}

fn absorb(mut set: ClauseSet) -> ClauseSet {
    set.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    set.dedup();
    let mut kept: ClauseSet = Vec::with_capacity(set.len());
    for c in set {
        if !kept.iter().any(|k| k.is_subset(&c)) {
            kept.push(c);
        }
    }
    kept
}

struct Algebra {
    form: Form,
    words: usize,
}

impl Algebra {
    fn truth(&self) -> ClauseSet {
        match self.form {
            Form::Dnf => vec![Clause::empty(self.words)],
            Form::Cnf => vec![],
        }
    }

    fn falsity(&self) -> ClauseSet {
        match self.form {
            Form::Dnf => vec![],
            Form::Cnf => vec![Clause::empty(self.words)],
        }
    }

    fn union(a: &ClauseSet, b: &ClauseSet) -> ClauseSet {
        absorb(a.iter().chain(b).cloned().collect())
    }

    fn product(a: &ClauseSet, b: &ClauseSet) -> Result<ClauseSet> {
        let n = a.len().saturating_mul(b.len());
        if n > MAX_INTERMEDIATE_CLAUSES {
            return Err(FtError::Capacity {
                what: "normal-form clauses",
                actual: n,
                limit: MAX_INTERMEDIATE_CLAUSES,
            });
        }
        let mut out = Vec::with_capacity(n);
        for x in a {
            for y in b {
                out.push(x.union(y));
            }
        }
        // Over disjoint supports the pairwise unions of two antichains are
        // again a duplicate-free antichain.
        if support(a).is_disjoint_from(&support(b)) {
            out.sort();
            Ok(out)
        } else {
            Ok(absorb(out))
        }
    }

    fn or(&self, a: &ClauseSet, b: &ClauseSet) -> Result<ClauseSet> {
        match self.form {
            Form::Dnf => Ok(Self::union(a, b)),
            Form::Cnf => Self::product(a, b),
        }
    }

    fn and(&self, a: &ClauseSet, b: &ClauseSet) -> Result<ClauseSet> {
        match self.form {
            Form::Dnf => Self::product(a, b),
            Form::Cnf => Ok(Self::union(a, b)),
        }
    }

    fn gate(&self, gate: &Gate, inputs: &[&ClauseSet]) -> Result<ClauseSet> {
        match inputs.len() {
            0 => return Ok(self.falsity()),
            1 => return Ok(inputs[0].clone()),
            _ => {}
        }
        match gate.kind {
            GateKind::And => inputs
                .iter()
                .try_fold(self.truth(), |acc, x| self.and(&acc, x)),
            GateKind::Or => inputs
                .iter()
                .try_fold(self.falsity(), |acc, x| self.or(&acc, x)),
            GateKind::AtLeast(k) => {
                let k = (k as usize).min(inputs.len());
                let mut at_least: Vec<ClauseSet> = vec![self.falsity(); k + 1];
                at_least[0] = self.truth();
                for x in inputs {
                    for j in (1..=k).rev() {
                        let with_x = self.and(&at_least[j - 1], x)?;
                        at_least[j] = self.or(&at_least[j], &with_x)?;
                    }
                }
                Ok(at_least.swap_remove(k))
            }
        }
    }
}

/// Reduce `ft` to an equivalent clause set in `form`.
pub fn to_normal_form(ft: &FaultTree, form: Form) -> Result<NormalForm> {
    let bes: Vec<&NodeId> = ft.basic_events().iter().collect();
    let words = bes.len().div_ceil(64).max(1);
    let algebra = Algebra { form, words };
    let mut memo: HashMap<NodeId, ClauseSet> = HashMap::new();
    for (i, be) in bes.iter().enumerate() {
        let unit = vec![Clause::unit(words, i)];
        memo.insert((*be).clone(), unit);
    }
    for id in ft.topological_gates()? {
        let gate = &ft.gates()[&id];
        let inputs: Vec<&ClauseSet> = gate
            .inputs
            .iter()
            .map(|i| {
                memo.get(i).ok_or_else(|| {
                    FtError::InvalidTree(format!("gate `{id}` reads undefined node `{i}`"))
                })
            })
            .collect::<Result<_>>()?;
        let set = algebra.gate(gate, &inputs)?;
        memo.insert(id, set);
    }
    let top = memo
        .remove(ft.top())
        .ok_or_else(|| FtError::InvalidTree(format!("top event `{}` has no gate", ft.top())))?;
    let clauses = top
        .iter()
        .map(|c| c.indices().map(|i| bes[i].clone()).collect())
        .collect();
    Ok(NormalForm { form, clauses })
}

/// Two-level tree equivalent to `nf`. Singleton clauses attach their literal
/// directly to the top gate.
pub fn from_normal_form(nf: &NormalForm, top_name: &str) -> Result<FaultTree> {
    if nf.clauses.is_empty() {
        return Err(FtError::Input("normal form has no clauses".into()));
    }
    let literals = nf.literals();
    if literals.contains(top_name) {
        return Err(FtError::Input(format!(
            "top name `{top_name}` collides with a literal"
        )));
    }
    let (outer, inner) = match nf.form {
        Form::Cnf => (GateKind::And, GateKind::Or),
        Form::Dnf => (GateKind::Or, GateKind::And),
    };
    if nf.form == Form::Dnf && nf.clauses.iter().any(BTreeSet::is_empty) {
        return Err(FtError::Input(
            "constant-true DNF has no monotone fault tree".into(),
        ));
    }
    if nf.clauses.len() == 1 {
        let clause = nf.clauses.iter().next().unwrap();
        return Ok(FaultTree::single_gate(top_name, inner, clause.iter().cloned()));
    }
    let mut ft = FaultTree::single_gate(top_name, outer, literals.iter().cloned());
    // Start from the literal-only top and rebuild its inputs clause by clause.
    ft.gate_mut(top_name).unwrap().inputs.clear();
    for clause in &nf.clauses {
        if clause.len() == 1 {
            let lit = clause.iter().next().unwrap().clone();
            ft.gate_mut(top_name).unwrap().inputs.insert(lit);
        } else {
            let name = ft.fresh_gate_name(&literals);
            ft.insert_gate(name.clone(), Gate::new(inner, clause.iter().cloned()));
            ft.gate_mut(top_name).unwrap().inputs.insert(name);
        }
    }
    ft.tidy();
    Ok(ft)
}

impl FaultTree {
    pub fn to_normal_form(&self, form: Form) -> Result<NormalForm> {
        to_normal_form(self, form)
    }
}
