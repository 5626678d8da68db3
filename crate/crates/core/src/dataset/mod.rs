//! Observational data: Boolean records with multiplicities.

mod bits;
mod csv_io;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::equivalence::enumeration_columns;
use crate::error::{DataError, FtError, Result};
use crate::tree::{CompiledTree, FaultTree, NodeId};

pub use bits::BitTable;

/// Largest tree for which [`full_truth_table`] enumerates assignments.
pub const MAX_TRUTH_TABLE_EVENTS: usize = 20;

/// One valuation of every dataset variable, observed `count` times.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Record {
    /// Values in the dataset's variable order.
    pub values: Vec<bool>,
    pub count: u64,
}

/// A multiset of records over a shared, ordered variable set. Records are
/// unique and kept in lexicographic order of their values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    variables: Vec<NodeId>,
    top: usize,
    records: Vec<Record>,
}

/// Parameters of a train/test partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Result<Self> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(FtError::Input(format!(
                "train fraction {train_fraction} must lie strictly between 0 and 1"
            )));
        }
        Ok(SplitSpec {
            train_fraction,
            seed,
        })
    }
}

impl Dataset {
    /// Build a dataset from rows of values, merging duplicate valuations.
    pub fn new<I>(variables: Vec<NodeId>, top_variable: &str, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<bool>, u64)>,
    {
        let top = variables
            .iter()
            .position(|v| v.as_str() == top_variable)
            .ok_or_else(|| DataError::UnknownTop(top_variable.to_string()))?;
        let mut merged: BTreeMap<Vec<bool>, u64> = BTreeMap::new();
        for (values, count) in rows {
            if values.len() != variables.len() {
                return Err(FtError::Input(format!(
                    "row has {} values for {} variables",
                    values.len(),
                    variables.len()
                )));
            }
            if count == 0 {
                return Err(FtError::Input("record count must be positive".into()));
            }
            *merged.entry(values).or_insert(0) += count;
        }
        Ok(Dataset {
            variables,
            top,
            records: merged
                .into_iter()
                .map(|(values, count)| Record { values, count })
                .collect(),
        })
    }

    fn with_records(&self, rows: impl IntoIterator<Item = (Vec<bool>, u64)>) -> Dataset {
        let mut merged: BTreeMap<Vec<bool>, u64> = BTreeMap::new();
        for (values, count) in rows {
            *merged.entry(values).or_insert(0) += count;
        }
        Dataset {
            variables: self.variables.clone(),
            top: self.top,
            records: merged
                .into_iter()
                .map(|(values, count)| Record { values, count })
                .collect(),
        }
    }

    pub fn variables(&self) -> &[NodeId] {
        &self.variables
    }

    pub fn top_variable(&self) -> &NodeId {
        &self.variables[self.top]
    }

    pub fn top_index(&self) -> usize {
        self.top
    }

    /// Variables other than the top event: the candidate basic events.
    pub fn basic_event_variables(&self) -> Vec<NodeId> {
        self.variables
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.top)
            .map(|(_, v)| v.clone())
            .collect()
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.as_str() == name)
    }

    /// Total number of observations, Σk.
    pub fn total_count(&self) -> u64 {
        self.records.iter().map(|r| r.count).sum()
    }

    /// Count-weighted number of observations with the top event true.
    pub fn positive_count(&self) -> u64 {
        self.records
            .iter()
            .filter(|r| r.values[self.top])
            .map(|r| r.count)
            .sum()
    }

    /// Partition the distinct records with a seeded shuffle. The training
    /// half receives `ceil(train_fraction * |records|)` records, clamped so
    /// neither half is empty.
    pub fn split(&self, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
        let n = self.records.len();
        if n < 2 {
            return Err(DataError::TooFewRecords {
                needed: 2,
                found: n,
            }
            .into());
        }
        if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
            return Err(FtError::Input(format!(
                "train fraction {} must lie strictly between 0 and 1",
                spec.train_fraction
            )));
        }
        let wanted = (spec.train_fraction * n as f64 - 1e-9).ceil() as usize;
        let train_n = wanted.clamp(1, n - 1);
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        order.shuffle(&mut rng);
        let pick = |idx: &[usize]| {
            self.with_records(
                idx.iter()
                    .map(|&i| (self.records[i].values.clone(), self.records[i].count)),
            )
        };
        Ok((pick(&order[..train_n]), pick(&order[train_n..])))
    }

    /// Flip exactly one uniformly chosen variable in
    /// `round(fraction * Σk)` uniformly chosen observations.
    pub fn inject_noise(&self, fraction: f64, seed: u64) -> Result<Dataset> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(FtError::Input(format!(
                "noise fraction {fraction} outside [0, 1]"
            )));
        }
        let total = self.total_count();
        let noisy = ((fraction * total as f64).round() as u64).min(total);
        if noisy == 0 {
            return Ok(self.clone());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chosen = rand::seq::index::sample(&mut rng, total as usize, noisy as usize).into_vec();
        chosen.sort_unstable();

        let mut rows: Vec<(Vec<bool>, u64)> = Vec::with_capacity(self.records.len() + chosen.len());
        let mut next = chosen.iter().peekable();
        let mut start = 0u64;
        for record in &self.records {
            let end = start + record.count;
            let mut flipped = 0;
            while let Some(&&obs) = next.peek() {
                if obs as u64 >= end {
                    break;
                }
                next.next();
                flipped += 1;
                let mut values = record.values.clone();
                let var = rng.gen_range(0..values.len());
                values[var] = !values[var];
                rows.push((values, 1));
            }
            if record.count > flipped {
                rows.push((record.values.clone(), record.count - flipped));
            }
            start = end;
        }
        Ok(self.with_records(rows))
    }

    /// Parse comma-separated 0/1 data with a header row and an optional
    /// trailing `count` column.
    pub fn from_csv(text: &str, top_variable: &str) -> Result<Dataset> {
        csv_io::load_csv(text, top_variable)
    }

    /// Canonical CSV: variables in dataset order, trailing `count` column,
    /// rows in lexicographic order, LF line endings.
    pub fn to_csv(&self) -> String {
        csv_io::save_csv(self)
    }

    pub fn bit_table(&self) -> BitTable {
        BitTable::new(self)
    }
}

/// Every assignment of `ft`'s basic events (count 1 each) with the top
/// event column computed by evaluating `ft`.
pub fn full_truth_table(ft: &FaultTree) -> Result<Dataset> {
    let bes: Vec<NodeId> = ft.basic_events().iter().cloned().collect();
    let n = bes.len();
    if n > MAX_TRUTH_TABLE_EVENTS {
        return Err(FtError::Capacity {
            what: "basic events for a full truth table",
            actual: n,
            limit: MAX_TRUTH_TABLE_EVENTS,
        });
    }
    let compiled = CompiledTree::compile(ft, |id| bes.binary_search(id).ok())?;
    let words = if n >= 6 { 1usize << (n - 6) } else { 1 };
    let columns = enumeration_columns(n, 0, words);
    let top_bits = compiled.eval_columns(&columns, words);
    let mut variables = bes.clone();
    variables.push(ft.top().clone());
    let rows = (0..1usize << n).map(|r| {
        let mut values: Vec<bool> = (0..n).map(|i| r >> i & 1 == 1).collect();
        values.push(top_bits[r / 64] >> (r % 64) & 1 == 1);
        (values, 1)
    });
    Dataset::new(variables, ft.top().as_str(), rows)
}
