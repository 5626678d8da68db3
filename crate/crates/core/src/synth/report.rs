use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::Duration;

use serde::{Deserialize, Serialize};

/// One learning run inside a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: usize,
    /// Tree label: a generated-case tag or a benchmark file stem.
    pub name: String,
    /// What distinguishes runs on the same case: `ea`, `ea-p`, a noise
    /// level or a selection strategy.
    pub variant: String,
    pub seed: u64,
    pub num_bes: usize,
    pub num_gates: usize,
    pub noise: f64,
    pub train_fitness: f64,
    /// Accuracy on the complete truth table, or on the held-out split when
    /// the tree is too large to enumerate.
    pub test_accuracy: f64,
    pub holdout_accuracy: f64,
    pub iterations: usize,
    pub termination: String,
    /// First iteration whose best fitness reached 0.99.
    pub iterations_to_099: Option<usize>,
    pub positives: u64,
    pub warning: Option<String>,
    pub error: Option<String>,
    /// Best fitness after each iteration.
    pub curve: Vec<f64>,
    #[serde(skip)]
    pub runtime: Duration,
}

impl CaseResult {
    pub(crate) fn failed(case: usize, name: String, variant: String, seed: u64, error: String) -> Self {
        CaseResult {
            case,
            name,
            variant,
            seed,
            num_bes: 0,
            num_gates: 0,
            noise: 0.0,
            train_fitness: 0.0,
            test_accuracy: 0.0,
            holdout_accuracy: 0.0,
            iterations: 0,
            termination: "error".into(),
            iterations_to_099: None,
            positives: 0,
            warning: None,
            error: Some(error),
            curve: Vec::new(),
            runtime: Duration::ZERO,
        }
    }
}

/// Summary over the successful cases sharing a group key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub group: String,
    pub cases: usize,
    pub mean_test_accuracy: f64,
    pub median_test_accuracy: f64,
    pub mean_train_fitness: f64,
    pub mean_iterations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub suite: String,
    pub seed: u64,
    pub cases: Vec<CaseResult>,
    /// Grouped by variant.
    pub by_variant: Vec<Aggregate>,
    /// Grouped by variant and basic-event count.
    pub by_size: Vec<Aggregate>,
    /// Regression bounds a caller chose to check this report against.
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn aggregate<K: Fn(&CaseResult) -> String>(cases: &[CaseResult], key: K) -> Vec<Aggregate> {
    let mut groups: BTreeMap<String, Vec<&CaseResult>> = BTreeMap::new();
    for c in cases.iter().filter(|c| c.error.is_none()) {
        groups.entry(key(c)).or_default().push(c);
    }
    groups
        .into_iter()
        .map(|(group, members)| {
            let test: Vec<f64> = members.iter().map(|c| c.test_accuracy).collect();
            let train: Vec<f64> = members.iter().map(|c| c.train_fitness).collect();
            let iters: Vec<f64> = members.iter().map(|c| c.iterations as f64).collect();
            Aggregate {
                group,
                cases: members.len(),
                mean_test_accuracy: mean(&test),
                median_test_accuracy: median(&test),
                mean_train_fitness: mean(&train),
                mean_iterations: mean(&iters),
            }
        })
        .collect()
}

impl ExperimentReport {
    pub fn new(suite: &str, seed: u64, cases: Vec<CaseResult>) -> Self {
        let by_variant = aggregate(&cases, |c| c.variant.clone());
        let by_size = aggregate(&cases, |c| format!("{}/bes={:02}", c.variant, c.num_bes));
        ExperimentReport {
            suite: suite.to_string(),
            seed,
            cases,
            by_variant,
            by_size,
            thresholds: BTreeMap::new(),
        }
    }

    pub fn variant(&self, name: &str) -> Option<&Aggregate> {
        self.by_variant.iter().find(|a| a.group == name)
    }

    pub fn cases_of<'a>(&'a self, variant: &'a str) -> impl Iterator<Item = &'a CaseResult> + 'a {
        self.cases.iter().filter(move |c| c.variant == variant)
    }

    /// One row per case, without timings or curves.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "case,name,variant,seed,num_bes,num_gates,noise,train_fitness,test_accuracy,\
             holdout_accuracy,iterations,termination,iterations_to_099,positives,warning,error\n",
        );
        for c in &self.cases {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                c.case,
                c.name,
                c.variant,
                c.seed,
                c.num_bes,
                c.num_gates,
                c.noise,
                c.train_fitness,
                c.test_accuracy,
                c.holdout_accuracy,
                c.iterations,
                c.termination,
                c.iterations_to_099.map_or(String::new(), |i| i.to_string()),
                c.positives,
                csv_text(c.warning.as_deref()),
                csv_text(c.error.as_deref()),
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Wall-clock times, kept apart so the other exports are reproducible.
    pub fn timings_csv(&self) -> String {
        let mut out = String::from("case,name,variant,runtime_ms\n");
        for c in &self.cases {
            let _ = writeln!(
                out,
                "{},{},{},{:.3}",
                c.case,
                c.name,
                c.variant,
                c.runtime.as_secs_f64() * 1e3
            );
        }
        let _ = writeln!(
            out,
            "mean,,,{:.3}",
            mean(&self.cases.iter().map(|c| c.runtime.as_secs_f64() * 1e3).collect::<Vec<_>>())
        );
        out
    }
}

fn csv_text(s: Option<&str>) -> String {
    match s {
        None => String::new(),
        Some(s) => format!("\"{}\"", s.replace('"', "\"\"")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_and_mean() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&[]), 0.0);
        assert_eq!(mean(&[1.0, 2.0]), 1.5);
    }

    #[test]
    fn failed_cases_are_excluded_from_aggregates() {
        let mut ok = CaseResult::failed(0, "a".into(), "ea".into(), 0, String::new());
        ok.error = None;
        ok.test_accuracy = 0.5;
        let bad = CaseResult::failed(1, "b".into(), "ea".into(), 0, "boom, \"x\"".into());
        let report = ExperimentReport::new("t", 0, vec![ok, bad]);
        assert_eq!(report.variant("ea").unwrap().cases, 1);
        assert!(report.to_csv().contains("\"boom, \"\"x\"\"\""));
    }
}
