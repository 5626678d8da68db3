use std::collections::HashMap;

use crate::error::{FtError, Result};
use crate::tree::{CompiledTree, FaultTree, NodeId};

use super::Dataset;

/// A dataset transposed into one bitset per variable, one bit per distinct
/// record, for word-parallel tree evaluation. Record counts are stored as
/// binary bit-planes so weighted agreement reduces to popcounts.
#[derive(Debug, Clone)]
pub struct BitTable {
    index: HashMap<NodeId, usize>,
    top: usize,
    columns: Vec<Vec<u64>>,
    count_planes: Vec<Vec<u64>>,
    words: usize,
    records: usize,
    total: u64,
}

impl BitTable {
    pub fn new(data: &Dataset) -> Self {
        let records = data.records().len();
        let words = records.div_ceil(64).max(1);
        let mut columns = vec![vec![0u64; words]; data.variables().len()];
        let max_count = data.records().iter().map(|r| r.count).max().unwrap_or(0);
        let planes = (64 - max_count.leading_zeros()) as usize;
        let mut count_planes = vec![vec![0u64; words]; planes];
        for (r, record) in data.records().iter().enumerate() {
            let (w, bit) = (r / 64, 1u64 << (r % 64));
            for (c, &v) in record.values.iter().enumerate() {
                if v {
                    columns[c][w] |= bit;
                }
            }
            for (p, plane) in count_planes.iter_mut().enumerate() {
                if record.count >> p & 1 == 1 {
                    plane[w] |= bit;
                }
            }
        }
        BitTable {
            index: data
                .variables()
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), i))
                .collect(),
            top: data.top_index(),
            columns,
            count_planes,
            words,
            records,
            total: data.total_count(),
        }
    }

    /// Total observation count Σk.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn record_count(&self) -> usize {
        self.records
    }

    /// Lower `ft` against this table. Basic events must be non-top
    /// variables of the dataset.
    pub fn compile(&self, ft: &FaultTree) -> Result<CompiledTree> {
        let top = self.top;
        for be in ft.basic_events() {
            match self.index.get(be) {
                None => return Err(FtError::UnknownVariable(be.clone())),
                Some(&i) if i == top => {
                    return Err(FtError::Input(format!(
                        "basic event `{be}` is the dataset's top variable"
                    )))
                }
                Some(_) => {}
            }
        }
        CompiledTree::compile(ft, |id| self.index.get(id).copied())
    }

    /// Count-weighted number of observations where `ft` agrees with the
    /// top variable.
    pub fn agreement(&self, ft: &FaultTree) -> Result<u64> {
        let compiled = self.compile(ft)?;
        Ok(self.agreement_compiled(&compiled))
    }

    pub fn agreement_compiled(&self, compiled: &CompiledTree) -> u64 {
        let predicted = compiled.eval_columns(&self.columns, self.words);
        let label = &self.columns[self.top];
        let mut sum = 0u64;
        for w in 0..self.words {
            let hits = !(predicted[w] ^ label[w]);
            for (p, plane) in self.count_planes.iter().enumerate() {
                sum += u64::from((hits & plane[w]).count_ones()) << p;
            }
        }
        sum
    }

    /// Fraction of observations on which `ft` predicts the top variable.
    /// An empty table scores 0.
    pub fn fitness(&self, ft: &FaultTree) -> Result<f64> {
        let agree = self.agreement(ft)?;
        Ok(if self.total == 0 {
            0.0
        } else {
            agree as f64 / self.total as f64
        })
    }
}
