//! Bit-parallel evaluation: one `u64` word carries 64 assignments.

use super::{FaultTree, GateKind, NodeId};
use crate::error::{FtError, Result};

#[derive(Debug, Clone, Copy)]
enum Source {
    Column(usize),
    Step(usize),
}

#[derive(Debug, Clone)]
struct Step {
    kind: GateKind,
    inputs: Vec<Source>,
}

/// A fault tree lowered to a straight-line program over variable columns.
#[derive(Debug, Clone)]
pub struct CompiledTree {
    steps: Vec<Step>,
}

impl CompiledTree {
    /// Lower `ft`, resolving every basic event to a column index through
    /// `column_of`.
    pub fn compile<F>(ft: &FaultTree, column_of: F) -> Result<Self>
    where
        F: Fn(&NodeId) -> Option<usize>,
    {
        let order = ft.topological_gates()?;
        let mut step_of = std::collections::HashMap::with_capacity(order.len());
        let mut steps = Vec::with_capacity(order.len());
        for id in &order {
            let gate = &ft.gates()[id];
            let inputs = gate
                .inputs
                .iter()
                .map(|input| {
                    if let Some(&s) = step_of.get(input) {
                        Ok(Source::Step(s))
                    } else if ft.is_basic_event(input) {
                        column_of(input)
                            .map(Source::Column)
                            .ok_or_else(|| FtError::UnknownVariable(input.clone()))
                    } else {
                        Err(FtError::InvalidTree(format!(
                            "gate `{id}` reads undefined node `{input}`"
                        )))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            step_of.insert(id.clone(), steps.len());
            steps.push(Step {
                kind: gate.kind,
                inputs,
            });
        }
        let top = *step_of
            .get(ft.top())
            .ok_or_else(|| FtError::InvalidTree(format!("top event `{}` has no gate", ft.top())))?;
        // Only the steps feeding the top matter, and the top is last in a
        // topological order restricted to its descendants; truncate there.
        steps.truncate(top + 1);
        Ok(CompiledTree { steps })
    }

    /// Evaluate 64 assignments at word index `word`.
    pub fn eval_word(&self, columns: &[Vec<u64>], word: usize, scratch: &mut Vec<u64>) -> u64 {
        let mut values = std::mem::take(scratch);
        values.clear();
        let mut counters: Vec<u64> = Vec::new();
        for step in &self.steps {
            let read = |s: &Source, values: &Vec<u64>| match *s {
                Source::Column(c) => columns[c][word],
                Source::Step(i) => values[i],
            };
            let v = match step.inputs.len() {
                0 => 0,
                1 => read(&step.inputs[0], &values),
                n => match step.kind {
                    GateKind::And => step.inputs.iter().fold(!0, |acc, s| acc & read(s, &values)),
                    GateKind::Or => step.inputs.iter().fold(0, |acc, s| acc | read(s, &values)),
                    GateKind::AtLeast(k) => {
                        let k = (k as usize).min(n);
                        // counters[j]: at least j inputs seen true so far.
                        counters.clear();
                        counters.resize(k + 1, 0);
                        counters[0] = !0;
                        for s in &step.inputs {
                            let x = read(s, &values);
                            for j in (1..=k).rev() {
                                counters[j] |= counters[j - 1] & x;
                            }
                        }
                        counters[k]
                    }
                },
            };
            values.push(v);
        }
        let out = *values.last().unwrap_or(&0);
        *scratch = values;
        out
    }

    /// Evaluate all `words` words of the columns.
    pub fn eval_columns(&self, columns: &[Vec<u64>], words: usize) -> Vec<u64> {
        let mut scratch = Vec::with_capacity(self.steps.len());
        (0..words)
            .map(|w| self.eval_word(columns, w, &mut scratch))
            .collect()
    }
}
