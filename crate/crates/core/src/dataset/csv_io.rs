use std::collections::BTreeSet;
use std::fmt::Write;

use crate::error::{DataError, Result};
use crate::tree::{is_valid_name, NodeId};

use super::Dataset;

const COUNT_COLUMN: &str = "count";

pub(super) fn load_csv(text: &str, top_variable: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = reader.records();
    let header = match rows.next() {
        Some(h) => h.map_err(|e| DataError::Csv(e.to_string()))?,
        None => return Err(DataError::Empty.into()),
    };
    let mut names: Vec<&str> = header.iter().collect();
    let has_count = names.last() == Some(&COUNT_COLUMN);
    if has_count {
        names.pop();
    }
    let mut seen = BTreeSet::new();
    for name in &names {
        if !is_valid_name(name) {
            return Err(DataError::InvalidName(name.to_string()).into());
        }
        if !seen.insert(*name) {
            return Err(DataError::DuplicateColumn(name.to_string()).into());
        }
    }
    if !seen.contains(top_variable) {
        return Err(DataError::UnknownTop(top_variable.to_string()).into());
    }
    let variables: Vec<NodeId> = names.iter().map(|n| NodeId::new(n)).collect();
    let expected = header.len();

    let mut parsed = Vec::new();
    for row in rows {
        let row = row.map_err(|e| DataError::Csv(e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() == 1 && row.get(0) == Some("") {
            continue;
        }
        if row.len() != expected {
            return Err(DataError::RaggedRow {
                line,
                expected,
                found: row.len(),
            }
            .into());
        }
        let values = variables
            .iter()
            .zip(row.iter())
            .map(|(name, cell)| match cell {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(DataError::NonBooleanCell {
                    line,
                    column: name.to_string(),
                    value: cell.to_string(),
                }),
            })
            .collect::<Result<Vec<bool>, DataError>>()?;
        let count = if has_count {
            let cell = &row[expected - 1];
            match cell.parse::<u64>() {
                Ok(c) if c > 0 => c,
                _ => {
                    return Err(DataError::InvalidCount {
                        line,
                        value: cell.to_string(),
                    }
                    .into())
                }
            }
        } else {
            1
        };
        parsed.push((values, count));
    }
    if parsed.is_empty() {
        return Err(DataError::Empty.into());
    }
    Dataset::new(variables, top_variable, parsed)
}

pub(super) fn save_csv(data: &Dataset) -> String {
    let mut out = String::new();
    for name in data.variables() {
        out.push_str(name);
        out.push(',');
    }
    out.push_str(COUNT_COLUMN);
    out.push('\n');
    for record in data.records() {
        for &v in &record.values {
            out.push(if v { '1' } else { '0' });
            out.push(',');
        }
        let _ = writeln!(out, "{}", record.count);
    }
    out
}
