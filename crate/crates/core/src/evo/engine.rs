use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::EaConfig;
use super::operators::{crossover_in, Operator, OperatorContext, Restriction};
use super::select::{elitist_order, select_indices};
use crate::dataset::Dataset;
use crate::error::{FtError, Result};
use crate::normal_form::{from_normal_form, to_normal_form, Form};
use crate::tree::{FaultTree, GateKind, NodeId};

/// Where an individual came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Origin {
    Seed,
    Op(Operator),
}

impl Origin {
    /// Every origin, in report column order.
    pub fn all() -> Vec<Origin> {
        std::iter::once(Origin::Seed)
            .chain(Operator::ALL.into_iter().map(Origin::Op))
            .collect()
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Seed => f.write_str("seed"),
            Origin::Op(op) => f.write_str(op.name()),
        }
    }
}

impl FromStr for Origin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "seed" {
            Ok(Origin::Seed)
        } else {
            s.parse().map(Origin::Op)
        }
    }
}

impl From<Origin> for String {
    fn from(o: Origin) -> String {
        o.to_string()
    }
}

impl TryFrom<String> for Origin {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// A member of the population.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub ft: FaultTree,
    pub fitness: f64,
    pub birth: usize,
    pub origin: Origin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    TargetReached,
    MaxIterations,
    Converged,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::TargetReached => "target_reached",
            Termination::MaxIterations => "max_iterations",
            Termination::Converged => "converged",
        })
    }
}

/// Population statistics after selection at one iteration. Iteration 0
/// describes the seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub population: usize,
    /// Offspring evaluated this iteration.
    pub offspring: usize,
    /// Selected individuals born this iteration, by origin.
    pub survivors: BTreeMap<Origin, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub iterations: Vec<IterationStats>,
    pub termination: Termination,
    /// Index of the last iteration performed.
    pub iterations_run: usize,
    pub best_fitness: f64,
    /// Excluded from serialization so reruns produce identical files.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunTrace {
    pub fn best_fitness_series(&self) -> Vec<f64> {
        self.iterations.iter().map(|s| s.best_fitness).collect()
    }

    /// One row per iteration with a survivor column per origin.
    pub fn to_csv(&self) -> String {
        let origins = Origin::all();
        let mut out = String::from("iteration,best_fitness,mean_fitness,population,offspring");
        for o in &origins {
            out.push(',');
            out.push_str(&o.to_string());
        }
        out.push('\n');
        for s in &self.iterations {
            out.push_str(&format!(
                "{},{},{},{},{}",
                s.iteration, s.best_fitness, s.mean_fitness, s.population, s.offspring
            ));
            for o in &origins {
                out.push_str(&format!(",{}", s.survivors.get(o).copied().unwrap_or(0)));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<RunTrace> {
        serde_json::from_str(text).map_err(|e| FtError::Input(format!("invalid trace: {e}")))
    }
}

/// Operator survival counts: `rows[i][j]` is the number of individuals
/// selected at iteration `iterations[i]` that were produced there by
/// `origins[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalTable {
    pub origins: Vec<Origin>,
    pub iterations: Vec<usize>,
    pub rows: Vec<Vec<usize>>,
}

impl SurvivalTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration");
        for o in &self.origins {
            out.push(',');
            out.push_str(&o.to_string());
        }
        out.push('\n');
        for (it, row) in self.iterations.iter().zip(&self.rows) {
            out.push_str(&it.to_string());
            for c in row {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn operator_survival_stats(trace: &RunTrace) -> SurvivalTable {
    let origins = Origin::all();
    SurvivalTable {
        iterations: trace.iterations.iter().map(|s| s.iteration).collect(),
        rows: trace
            .iterations
            .iter()
            .map(|s| {
                origins
                    .iter()
                    .map(|o| s.survivors.get(o).copied().unwrap_or(0))
                    .collect()
            })
            .collect(),
        origins,
    }
}

/// Outcome of a run.
#[derive(Debug, Clone)]
pub struct RunResult {
    /// The best individual of the final population.
    pub best_raw: FaultTree,
    /// `best_raw` reduced to conjunctive normal form, or `best_raw` itself
    /// when the reduction exceeds capacity or denotes a constant.
    pub best: FaultTree,
    pub best_fitness: f64,
    pub trace: RunTrace,
}

/// The two seed trees: the top event as AND and as OR of every other
/// variable.
pub fn seed_population(variables: &[NodeId], top: &NodeId) -> Result<Vec<FaultTree>> {
    if !variables.contains(top) {
        return Err(FtError::Input(format!("top event `{top}` is not a variable")));
    }
    let bes: Vec<NodeId> = variables.iter().filter(|v| *v != top).cloned().collect();
    if bes.is_empty() {
        return Err(FtError::Input("need at least one variable besides the top event".into()));
    }
    Ok([GateKind::And, GateKind::Or]
        .into_iter()
        .map(|kind| FaultTree::single_gate(top, kind, bes.iter().cloned()))
        .collect())
}

/// Learn a fault tree for `train`'s top variable.
pub fn run(train: &Dataset, cfg: &EaConfig) -> Result<RunResult> {
    run_observed(train, cfg, |_, _| {})
}

/// [`run`], calling `observer` with every selected population, starting
/// with the seeds at iteration 0.
pub fn run_observed<F>(train: &Dataset, cfg: &EaConfig, observer: F) -> Result<RunResult>
where
    F: FnMut(usize, &[Individual]),
{
    let seeds = seed_population(train.variables(), train.top_variable())?;
    Engine {
        train,
        cfg,
        fixed: &Restriction::default(),
        accept: &|_| true,
    }
    .run(seeds, observer)
}

pub(crate) struct Engine<'a> {
    pub train: &'a Dataset,
    pub cfg: &'a EaConfig,
    pub fixed: &'a Restriction,
    /// Offspring failing this check are discarded.
    pub accept: &'a (dyn Fn(&FaultTree) -> bool + Sync),
}

impl Engine<'_> {
    pub fn run<F>(&self, seeds: Vec<FaultTree>, mut observer: F) -> Result<RunResult>
    where
        F: FnMut(usize, &[Individual]),
    {
        let cfg = self.cfg;
        cfg.validate()?;
        let started = Instant::now();
        let table = self.train.bit_table();
        let ctx = OperatorContext::new(
            self.train.variables().iter().cloned(),
            self.train.top_variable(),
            cfg.enable_kn_gates,
        );
        let cap = cfg.gate_cap(self.train.variables().len());
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let fitness_of = |fts: &[FaultTree]| -> Result<Vec<f64>> {
            let total = table.total();
            fts.par_iter()
                .map(|ft| {
                    let agree = table.agreement(ft)?;
                    Ok(if total == 0 { 0.0 } else { agree as f64 / total as f64 })
                })
                .collect()
        };

        let seed_fitness = fitness_of(&seeds)?;
        let pool: Vec<Individual> = seeds
            .into_iter()
            .zip(seed_fitness)
            .map(|(ft, fitness)| Individual {
                ft,
                fitness,
                birth: 0,
                origin: Origin::Seed,
            })
            .collect();
        let keep = cfg.population_size.min(pool.len());
        let mut population: Vec<Individual> = select_indices(&pool, keep, cfg.selection, &mut rng)
            .into_iter()
            .map(|i| pool[i].clone())
            .collect();

        let mut iterations = vec![stats(0, &population, pool.len())];
        observer(0, &population);
        let mut best_ever = iterations[0].best_fitness;
        let mut last_improvement = 0;
        let mut operators: Vec<Operator> = Operator::ALL
            .into_iter()
            .filter(|op| cfg.enable_kn_gates || *op != Operator::KNChange)
            .collect();

        let mut iteration = 0;
        let termination = loop {
            if best_ever >= cfg.target_fitness {
                break Termination::TargetReached;
            }
            if iteration >= cfg.max_iterations {
                break Termination::MaxIterations;
            }
            if iteration - last_improvement >= cfg.convergence_window {
                break Termination::Converged;
            }
            iteration += 1;

            operators.shuffle(&mut rng);
            let mut offspring: Vec<(FaultTree, Origin)> = Vec::new();
            for &op in &operators {
                if op == Operator::Crossover {
                    let mut order: Vec<usize> = (0..population.len()).collect();
                    order.shuffle(&mut rng);
                    for pair in order.chunks_exact(2) {
                        if !rng.gen_bool(cfg.operator_probability) {
                            continue;
                        }
                        let (a, b) = (&population[pair[0]].ft, &population[pair[1]].ft);
                        if let Some((c1, c2)) = crossover_in(a, b, &ctx, self.fixed, &mut rng) {
                            offspring.push((c1, Origin::Op(op)));
                            offspring.push((c2, Origin::Op(op)));
                        }
                    }
                } else {
                    for ind in &population {
                        if !rng.gen_bool(cfg.operator_probability) {
                            continue;
                        }
                        if let Some(child) = op.apply_restricted(&ind.ft, &ctx, self.fixed, &mut rng) {
                            offspring.push((child, Origin::Op(op)));
                        }
                    }
                }
            }
            offspring.retain(|(ft, _)| ft.gate_count() <= cap && (self.accept)(ft));

            let (trees, origins): (Vec<FaultTree>, Vec<Origin>) = offspring.into_iter().unzip();
            let fitness = fitness_of(&trees)?;
            let born = trees.len();
            let mut pool = population;
            pool.extend(trees.into_iter().zip(origins).zip(fitness).map(
                |((ft, origin), fitness)| Individual {
                    ft,
                    fitness,
                    birth: iteration,
                    origin,
                },
            ));
            let keep = cfg.population_size.min(pool.len());
            population = select_indices(&pool, keep, cfg.selection, &mut rng)
                .into_iter()
                .map(|i| pool[i].clone())
                .collect();

            let row = stats(iteration, &population, born);
            if row.best_fitness > best_ever {
                best_ever = row.best_fitness;
                last_improvement = iteration;
            }
            iterations.push(row);
            observer(iteration, &population);
        };

        let best_raw = population
            .iter()
            .min_by(|a, b| elitist_order(a, b))
            .expect("population is never empty")
            .clone();
        let best = to_normal_form(&best_raw.ft, Form::Cnf)
            .and_then(|nf| from_normal_form(&nf, best_raw.ft.top()))
            .unwrap_or_else(|_| best_raw.ft.clone());
        Ok(RunResult {
            best,
            best_fitness: best_raw.fitness,
            trace: RunTrace {
                iterations,
                termination,
                iterations_run: iteration,
                best_fitness: best_raw.fitness,
                wall_time: started.elapsed(),
            },
            best_raw: best_raw.ft,
        })
    }
}

fn stats(iteration: usize, population: &[Individual], offspring: usize) -> IterationStats {
    let best = population.iter().map(|i| i.fitness).fold(0.0, f64::max);
    let mean = population.iter().map(|i| i.fitness).sum::<f64>() / population.len() as f64;
    let mut survivors: BTreeMap<Origin, usize> = Origin::all().into_iter().map(|o| (o, 0)).collect();
    for ind in population.iter().filter(|i| i.birth == iteration) {
        *survivors.entry(ind.origin).or_insert(0) += 1;
    }
    IterationStats {
        iteration,
        best_fitness: best,
        mean_fitness: mean,
        population: population.len(),
        offspring,
        survivors,
    }
}
