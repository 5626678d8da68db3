use std::collections::HashMap;

use super::{FaultTree, NodeId};
use crate::error::{FtError, Result};

impl FaultTree {
    /// Value of the top event under `assignment`. Variables that are not
    /// basic events of this tree are ignored.
    pub fn evaluate(&self, assignment: &HashMap<NodeId, bool>) -> Result<bool> {
        self.evaluate_with(|id| assignment.get(id).copied())
    }

    /// Like [`FaultTree::evaluate`] with a caller-provided lookup.
    pub fn evaluate_with<F>(&self, lookup: F) -> Result<bool>
    where
        F: Fn(&NodeId) -> Option<bool>,
    {
        let mut values: HashMap<&NodeId, bool> = HashMap::with_capacity(self.gates.len());
        for be in &self.basic_events {
            let v = lookup(be).ok_or_else(|| FtError::MissingAssignment(be.clone()))?;
            values.insert(be, v);
        }
        for id in self.topological_gates()? {
            let gate = &self.gates[&id];
            let mut true_count = 0;
            for input in &gate.inputs {
                match values.get(input) {
                    Some(true) => true_count += 1,
                    Some(false) => {}
                    None => {
                        return Err(FtError::InvalidTree(format!(
                            "gate `{id}` reads undefined node `{input}`"
                        )))
                    }
                }
            }
            let v = gate.kind.fires(true_count, gate.inputs.len());
            let key = self.gates.get_key_value(&id).map(|(k, _)| k).unwrap();
            values.insert(key, v);
        }
        values
            .get(&self.top)
            .copied()
            .ok_or_else(|| FtError::InvalidTree(format!("top event `{}` has no gate", self.top)))
    }
}
