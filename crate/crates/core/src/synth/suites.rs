use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{generate_ft, sample_dataset, GenSpec};
use super::report::{CaseResult, ExperimentReport};
use crate::dataset::{full_truth_table, Dataset, SplitSpec};
use crate::error::Result;
use crate::evo::{run, EaConfig, RunResult, RunTrace, Selection};
use crate::galileo;
use crate::skeleton::{run_partial, Skeleton};
use crate::tree::{FaultTree, NodeId};

/// Trees up to this size are tested on their complete truth table.
pub const FULL_TABLE_TEST_LIMIT: usize = 16;

/// Fewer positive observations than this in a sampled benchmark dataset
/// trigger a warning.
pub const MIN_POSITIVES: u64 = 100;

/// Where training data comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataMode {
    /// Every assignment once.
    FullTable,
    /// This many observations drawn from the basic-event probabilities.
    Sampled(u64),
}

/// Settings shared by every case of a suite. `cfg.seed` is the suite seed;
/// each case derives its own streams from it and its index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSettings {
    pub cfg: EaConfig,
    pub train_fraction: f64,
    pub data: DataMode,
}

impl Default for SuiteSettings {
    fn default() -> Self {
        SuiteSettings {
            cfg: EaConfig::default(),
            train_fraction: 2.0 / 3.0,
            data: DataMode::FullTable,
        }
    }
}

const STREAM_SPLIT: u64 = 1;
const STREAM_EA: u64 = 2;
const STREAM_NOISE: u64 = 3;
const STREAM_SAMPLE: u64 = 4;
const STREAM_SPEC: u64 = 5;

/// An independent seed for `(seed, index, stream)`, via SplitMix64.
pub fn derive_seed(seed: u64, index: u64, stream: u64) -> u64 {
    let mut z = seed
        ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `count` specs cycling through `min_bes..=max_bes`, each with between 2
/// and `bes / 2` gates.
pub fn generated_specs(count: usize, min_bes: usize, max_bes: usize, seed: u64) -> Vec<GenSpec> {
    let span = max_bes.saturating_sub(min_bes) + 1;
    (0..count)
        .map(|i| {
            let bes = min_bes + i % span;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64, STREAM_SPEC));
            let max_gates = (bes / 2).max(2).min(bes - 1);
            let gates = rng.gen_range(2.min(max_gates)..=max_gates);
            GenSpec::new(bes, gates, rng.gen())
        })
        .collect()
}

/// The top gate and the gates directly below it, each with all of its
/// inputs. Gates one level further down appear as bare frames holding only
/// their kind; an `AtLeast` frame keeps its whole subtree instead, since
/// its cardinality needs the inputs.
pub fn two_layer_skeleton(ft: &FaultTree) -> Result<Skeleton> {
    let top = ft.top();
    let top_gate = &ft.gates()[top];
    let mut full: BTreeSet<NodeId> = BTreeSet::from([top.clone()]);
    full.extend(top_gate.inputs.iter().filter(|c| ft.is_gate(c)).cloned());
    let mut frames = BTreeSet::new();
    for id in full.clone() {
        let below: Vec<&NodeId> = ft.gates()[&id]
            .inputs
            .iter()
            .filter(|c| ft.is_gate(c) && !full.contains(*c))
            .collect();
        for input in below {
            if ft.gates()[input].kind.is_at_least() {
                full.extend(ft.descendants(input).into_iter().filter(|d| ft.is_gate(d)));
            } else {
                frames.insert(input.clone());
            }
        }
    }
    let mut builder = FaultTree::builder(top);
    for id in &full {
        let g = &ft.gates()[id];
        builder = builder.gate(id, g.kind, g.inputs.iter().cloned());
    }
    for id in frames.difference(&full) {
        builder = builder.gate(id, ft.gates()[id].kind, Vec::<NodeId>::new());
    }
    Skeleton::new(builder.build_unchecked())
}

struct CaseSeeds {
    split: u64,
    ea: u64,
    noise: u64,
    sample: u64,
}

impl CaseSeeds {
    fn new(seed: u64, index: usize) -> Self {
        let i = index as u64;
        CaseSeeds {
            split: derive_seed(seed, i, STREAM_SPLIT),
            ea: derive_seed(seed, i, STREAM_EA),
            noise: derive_seed(seed, i, STREAM_NOISE),
            sample: derive_seed(seed, i, STREAM_SAMPLE),
        }
    }
}

struct Prepared {
    train: Dataset,
    test: Dataset,
    truth: Option<Dataset>,
    positives: u64,
}

fn prepare(ft: &FaultTree, settings: &SuiteSettings, seeds: &CaseSeeds) -> Result<Prepared> {
    let data = match settings.data {
        DataMode::FullTable => full_truth_table(ft)?,
        DataMode::Sampled(n) => sample_dataset(ft, n, seeds.sample)?,
    };
    let positives = data.positive_count();
    let (train, test) = data.split(&SplitSpec::new(settings.train_fraction, seeds.split)?)?;
    let truth = if ft.basic_events().len() <= FULL_TABLE_TEST_LIMIT {
        Some(full_truth_table(ft)?)
    } else {
        None
    };
    Ok(Prepared {
        train,
        test,
        truth,
        positives,
    })
}

/// First iteration at which the best fitness reached `threshold`.
pub fn first_iteration_reaching(trace: &RunTrace, threshold: f64) -> Option<usize> {
    trace
        .iterations
        .iter()
        .find(|s| s.best_fitness >= threshold)
        .map(|s| s.iteration)
}

#[allow(clippy::too_many_arguments)]
fn learn_case(
    case: usize,
    name: &str,
    variant: String,
    target: &FaultTree,
    prepared: &Prepared,
    train: &Dataset,
    cfg: &EaConfig,
    noise: f64,
    skeleton: Option<&Skeleton>,
) -> Result<CaseResult> {
    let started = Instant::now();
    let result: RunResult = match skeleton {
        Some(sk) => run_partial(train, sk, cfg)?,
        None => run(train, cfg)?,
    };
    let runtime = started.elapsed();
    let test_set = prepared.truth.as_ref().unwrap_or(&prepared.test);
    let test_accuracy = test_set.bit_table().fitness(&result.best)?;
    let holdout_accuracy = prepared.test.bit_table().fitness(&result.best)?;
    Ok(CaseResult {
        case,
        name: name.to_string(),
        variant,
        seed: cfg.seed,
        num_bes: target.basic_events().len(),
        num_gates: target.gate_count(),
        noise,
        train_fitness: result.best_fitness,
        test_accuracy,
        holdout_accuracy,
        iterations: result.trace.iterations_run,
        termination: result.trace.termination.to_string(),
        iterations_to_099: first_iteration_reaching(&result.trace, 0.99),
        positives: prepared.positives,
        warning: None,
        error: None,
        curve: result.trace.best_fitness_series(),
        runtime,
    })
}

fn flatten(cases: Vec<Result<Vec<CaseResult>>>) -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for c in cases {
        out.extend(c?);
    }
    Ok(out)
}

/// Learn each generated tree from a split of its data and score the result.
/// With `with_skeleton`, each case is also learned from its two-layer
/// skeleton under variant `ea-p`.
pub fn run_accuracy_suite(
    specs: &[GenSpec],
    settings: &SuiteSettings,
    with_skeleton: bool,
) -> Result<ExperimentReport> {
    let suite_seed = settings.cfg.seed;
    let cases = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let target = generate_ft(spec)?;
            let seeds = CaseSeeds::new(suite_seed, i);
            let prepared = prepare(&target, settings, &seeds)?;
            let cfg = EaConfig { seed: seeds.ea, ..settings.cfg.clone() };
            let name = format!("case{i:03}");
            let mut rows = vec![learn_case(
                i, &name, "ea".into(), &target, &prepared, &prepared.train, &cfg, 0.0, None,
            )?];
            if with_skeleton {
                let sk = two_layer_skeleton(&target)?;
                rows.push(learn_case(
                    i, &name, "ea-p".into(), &target, &prepared, &prepared.train, &cfg, 0.0, Some(&sk),
                )?);
            }
            Ok(rows)
        })
        .collect();
    Ok(ExperimentReport::new("accuracy", suite_seed, flatten(cases)?))
}

/// Learn from noise-injected training data and score on clean data.
/// Splits and run seeds match [`run_accuracy_suite`] case by case.
pub fn run_noise_suite(
    specs: &[GenSpec],
    noise_levels: &[f64],
    settings: &SuiteSettings,
) -> Result<ExperimentReport> {
    let suite_seed = settings.cfg.seed;
    let cases = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let target = generate_ft(spec)?;
            let seeds = CaseSeeds::new(suite_seed, i);
            let prepared = prepare(&target, settings, &seeds)?;
            let cfg = EaConfig { seed: seeds.ea, ..settings.cfg.clone() };
            let name = format!("case{i:03}");
            noise_levels
                .iter()
                .map(|&level| {
                    let train = prepared.train.inject_noise(level, seeds.noise)?;
                    learn_case(
                        i, &name, format!("noise={level}"), &target, &prepared, &train, &cfg, level, None,
                    )
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect();
    Ok(ExperimentReport::new("noise", suite_seed, flatten(cases)?))
}

/// Learn one generated tree under each strategy, `repeats` times with
/// paired seeds.
pub fn run_selection_suite(
    spec: &GenSpec,
    strategies: &[Selection],
    repeats: usize,
    settings: &SuiteSettings,
) -> Result<ExperimentReport> {
    let suite_seed = settings.cfg.seed;
    let target = generate_ft(spec)?;
    let cases = (0..repeats)
        .into_par_iter()
        .map(|j| {
            let seeds = CaseSeeds::new(suite_seed, j);
            let prepared = prepare(&target, settings, &seeds)?;
            strategies
                .iter()
                .map(|&selection| {
                    let cfg = EaConfig { seed: seeds.ea, selection, ..settings.cfg.clone() };
                    learn_case(
                        j, "selection", selection.to_string(), &target, &prepared, &prepared.train, &cfg, 0.0, None,
                    )
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect();
    Ok(ExperimentReport::new("selection", suite_seed, flatten(cases)?))
}

/// Learn each named Galileo tree from data sampled at its basic-event
/// probabilities. Files that fail to parse or learn become error rows.
pub fn run_benchmark_suite(files: &[(String, String)], settings: &SuiteSettings) -> ExperimentReport {
    let suite_seed = settings.cfg.seed;
    let cases: Vec<CaseResult> = files
        .par_iter()
        .enumerate()
        .map(|(i, (name, text))| {
            let seeds = CaseSeeds::new(suite_seed, i);
            let attempt = || -> Result<CaseResult> {
                let target = galileo::parse(text)?;
                let prepared = prepare(&target, settings, &seeds)?;
                let cfg = EaConfig { seed: seeds.ea, ..settings.cfg.clone() };
                let mut row = learn_case(
                    i, name, "ea".into(), &target, &prepared, &prepared.train, &cfg, 0.0, None,
                )?;
                if matches!(settings.data, DataMode::Sampled(_)) && prepared.positives < MIN_POSITIVES {
                    row.warning = Some(format!(
                        "only {} positive observations; consider more records",
                        prepared.positives
                    ));
                }
                Ok(row)
            };
            attempt().unwrap_or_else(|e| {
                CaseResult::failed(i, name.clone(), "ea".into(), seeds.ea, e.to_string())
            })
        })
        .collect();
    ExperimentReport::new("benchmark", suite_seed, cases)
}
