//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL
//! line; the process exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use ftevolve_core::evo::{self, crossover, operator_survival_stats, run_observed, Operator};
use ftevolve_core::skeleton::{contains_skeleton, run_partial_observed};
use ftevolve_core::synth::{
    generate_ft, generated_specs, mean, median, run_accuracy_suite, run_noise_suite,
    run_selection_suite, DataMode, GenSpec, SuiteSettings,
};
use ftevolve_core::{
    full_truth_table, galileo, to_normal_form, Dataset, EaConfig, FaultTree, Form, GateKind,
    NodeId, Selection, Skeleton,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{context, lamp_data, lamp_tree, random_tree};

const SUITE_SEED: u64 = 2024;

// Criterion 1
const LAMP_RUNS: u64 = 10;
const LAMP_MIN_PERFECT: usize = 9;
const LAMP_MAX_SECONDS_PER_RUN: f64 = 5.0;

// Criterion 2
const ACCURACY_CASES: usize = 20;
const ACCURACY_MIN_BES: usize = 6;
const ACCURACY_MAX_BES: usize = 8;
const ACCURACY_MIN_MEDIAN: f64 = 0.95;
const ACCURACY_MIN_MEAN: f64 = 0.90;
const ACCURACY_MAX_SECONDS: f64 = 600.0;

// Criterion 3
const SKELETON_CASES: usize = 10;
const SKELETON_BES: usize = 10;
const SKELETON_MIN_FASTER: usize = 8;
const SKELETON_MIN_MEAN_ACCURACY: f64 = 0.95;

// Criterion 4
const NOISE_CASES: usize = 10;
const NOISE_BES: usize = 6;
const NOISE_LEVELS: [f64; 4] = [0.0, 0.01, 0.03, 0.05];
const NOISE_MIN_MEAN_AT_MAX: f64 = 0.9;

// Criterion 5
const NOZZLE_BES: usize = 8;
const NOZZLE_GATES: usize = 3;
const NOZZLE_OBSERVATIONS: u64 = 9000;
const NOZZLE_TRAIN_FRACTION: f64 = 0.8;
const NOZZLE_RUNS: usize = 10;
const NOZZLE_MIN_FITNESS: f64 = 0.99;
const NOZZLE_MIN_PASSING: usize = 9;

// Criterion 6
const SELECTION_BES: usize = 8;
const SELECTION_GATES: usize = 4;
const SELECTION_RUNS: usize = 10;

// Criterion 7
const OPERATOR_APPLICATIONS: u64 = 1000;
const NORMAL_FORM_TREES: u64 = 200;
const NORMAL_FORM_MAX_BES: usize = 12;
const MAX_AT_LEAST_ARITY: usize = 6;
const SKELETON_TRACES: usize = 10;
const ROUND_TRIP_TREES: u64 = 1000;
const RERUN_TRIPLES: u64 = 5;

// Criterion 8
const SURVIVAL_TRACES: u64 = 5;

type Outcome = (bool, String);

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("1 lamp recovery", lamp_recovery),
        ("2 synthetic accuracy", synthetic_accuracy),
        ("3 skeleton speed-up", skeleton_speedup),
        ("4 noise robustness", noise_robustness),
        ("5 nozzle-shaped regression", nozzle_regression),
        ("6 selection ordering", selection_ordering),
        ("7a operator well-formedness", operators_preserve_validity),
        ("7b normal forms vs truth tables", normal_forms_match_truth_tables),
        ("7c at-least expansion", at_least_expansion),
        ("7d skeleton preservation", skeleton_preserved_in_traces),
        ("7e serialization round trip", serialization_round_trip),
        ("7f bit-identical reruns", identical_reruns),
        ("8 survival statistics", survival_statistics),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let (pass, detail) = check();
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn lamp_recovery() -> Outcome {
    let data = lamp_data();
    let target = lamp_tree();
    let mut perfect = 0;
    let mut slowest: f64 = 0.0;
    for seed in 0..LAMP_RUNS {
        let started = Instant::now();
        let result = evo::run(&data, &EaConfig { seed, ..Default::default() }).unwrap();
        slowest = slowest.max(started.elapsed().as_secs_f64());
        if result.best_fitness == 1.0
            && result.best.equivalent_to(&target).unwrap()
        {
            perfect += 1;
        }
    }
    (
        perfect >= LAMP_MIN_PERFECT && slowest < LAMP_MAX_SECONDS_PER_RUN,
        format!(
            "{perfect}/{LAMP_RUNS} runs reach fitness 1 with a CNF equivalent to the lamp tree \
             (need {LAMP_MIN_PERFECT}); slowest run {slowest:.2}s (limit {LAMP_MAX_SECONDS_PER_RUN}s)"
        ),
    )
}

fn synthetic_accuracy() -> Outcome {
    let started = Instant::now();
    let specs = generated_specs(ACCURACY_CASES, ACCURACY_MIN_BES, ACCURACY_MAX_BES, SUITE_SEED);
    let settings = SuiteSettings {
        cfg: EaConfig { seed: SUITE_SEED, ..Default::default() },
        ..Default::default()
    };
    let report = run_accuracy_suite(&specs, &settings, false).unwrap();
    let acc: Vec<f64> = report.cases.iter().map(|c| c.test_accuracy).collect();
    let (med, avg) = (median(&acc), mean(&acc));
    let secs = started.elapsed().as_secs_f64();
    (
        med >= ACCURACY_MIN_MEDIAN && avg >= ACCURACY_MIN_MEAN && secs < ACCURACY_MAX_SECONDS,
        format!(
            "median test accuracy {med:.4} (need {ACCURACY_MIN_MEDIAN}), mean {avg:.4} \
             (need {ACCURACY_MIN_MEAN}) over {} cases",
            acc.len()
        ),
    )
}

fn skeleton_speedup() -> Outcome {
    let specs = generated_specs(SKELETON_CASES, SKELETON_BES, SKELETON_BES, SUITE_SEED + 1);
    let settings = SuiteSettings {
        cfg: EaConfig { seed: SUITE_SEED + 1, ..Default::default() },
        ..Default::default()
    };
    let report = run_accuracy_suite(&specs, &settings, true).unwrap();
    let plain: Vec<_> = report.cases_of("ea").collect();
    let partial: Vec<_> = report.cases_of("ea-p").collect();
    // A run that never reaches the threshold counts as infinitely slow.
    let reach = |c: &ftevolve_core::synth::CaseResult| {
        c.iterations_to_099.unwrap_or(usize::MAX)
    };
    let faster = plain
        .iter()
        .zip(&partial)
        .filter(|(e, p)| reach(p) != usize::MAX && reach(p) < reach(e))
        .count();
    let fmt = |i: usize| if i == usize::MAX { "-".to_string() } else { i.to_string() };
    let pairs: Vec<String> = plain
        .iter()
        .zip(&partial)
        .map(|(e, p)| format!("{}/{}", fmt(reach(e)), fmt(reach(p))))
        .collect();
    let acc = mean(&partial.iter().map(|c| c.test_accuracy).collect::<Vec<_>>());
    let it_e = mean(&plain.iter().map(|c| c.iterations as f64).collect::<Vec<_>>());
    let it_p = mean(&partial.iter().map(|c| c.iterations as f64).collect::<Vec<_>>());
    (
        faster >= SKELETON_MIN_FASTER && acc >= SKELETON_MIN_MEAN_ACCURACY,
        format!(
            "skeleton run reaches fitness 0.99 sooner in {faster}/{SKELETON_CASES} \
             pairs (need {SKELETON_MIN_FASTER}); mean skeleton test accuracy {acc:.4} \
             (need {SKELETON_MIN_MEAN_ACCURACY}); mean iterations {it_e:.1} vs {it_p:.1}; \
             iterations to 0.99 (plain/skeleton) {}",
            pairs.join(" ")
        ),
    )
}

fn noise_robustness() -> Outcome {
    let specs = generated_specs(NOISE_CASES, NOISE_BES, NOISE_BES, SUITE_SEED + 2);
    let settings = SuiteSettings {
        cfg: EaConfig { seed: SUITE_SEED + 2, ..Default::default() },
        ..Default::default()
    };
    let report = run_noise_suite(&specs, &NOISE_LEVELS, &settings).unwrap();
    let means: Vec<f64> = NOISE_LEVELS
        .iter()
        .map(|l| {
            let v: Vec<f64> = report
                .cases_of(&format!("noise={l}"))
                .map(|c| c.test_accuracy)
                .collect();
            mean(&v)
        })
        .collect();
    let monotone = means.windows(2).all(|w| w[1] <= w[0]);
    let at_max = *means.last().unwrap();
    (
        monotone && at_max >= NOISE_MIN_MEAN_AT_MAX,
        format!(
            "mean clean accuracy per noise level {:?} = {:?}; non-increasing: {monotone}; \
             at max noise {at_max:.4} (need {NOISE_MIN_MEAN_AT_MAX})",
            NOISE_LEVELS,
            means.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn nozzle_regression() -> Outcome {
    let spec = GenSpec::new(NOZZLE_BES, NOZZLE_GATES, SUITE_SEED + 3);
    let settings = SuiteSettings {
        cfg: EaConfig { seed: SUITE_SEED + 3, ..Default::default() },
        train_fraction: NOZZLE_TRAIN_FRACTION,
        data: DataMode::Sampled(NOZZLE_OBSERVATIONS),
    };
    let report = run_selection_suite(&spec, &[Selection::Elitist], NOZZLE_RUNS, &settings).unwrap();
    let fits: Vec<f64> = report.cases.iter().map(|c| c.train_fitness).collect();
    let passing = fits.iter().filter(|&&f| f >= NOZZLE_MIN_FITNESS).count();
    (
        passing >= NOZZLE_MIN_PASSING,
        format!(
            "{passing}/{NOZZLE_RUNS} runs reach train fitness {NOZZLE_MIN_FITNESS} \
             (need {NOZZLE_MIN_PASSING}); worst {:.4}",
            fits.iter().cloned().fold(1.0, f64::min)
        ),
    )
}

fn selection_ordering() -> Outcome {
    let spec = GenSpec::new(SELECTION_BES, SELECTION_GATES, SUITE_SEED + 4);
    let settings = SuiteSettings {
        cfg: EaConfig { seed: SUITE_SEED + 4, ..Default::default() },
        ..Default::default()
    };
    let strategies = [
        Selection::Elitist,
        Selection::Roulette,
        Selection::Sus,
        Selection::Tournament(2),
        Selection::Random,
    ];
    let report = run_selection_suite(&spec, &strategies, SELECTION_RUNS, &settings).unwrap();
    let med = |s: &Selection| {
        median(
            &report
                .cases_of(&s.to_string())
                .map(|c| c.test_accuracy)
                .collect::<Vec<_>>(),
        )
    };
    let elitist = med(&Selection::Elitist);
    let others: Vec<(String, f64)> = strategies[1..].iter().map(|s| (s.to_string(), med(s))).collect();
    let ordered = others.iter().all(|(_, m)| elitist >= *m);
    let monotone = report
        .cases_of("elitist")
        .all(|c| c.curve.windows(2).all(|w| w[1] >= w[0]));
    (
        ordered && monotone,
        format!(
            "elitist median {elitist:.4} vs {}; elitist curves non-decreasing: {monotone}",
            others
                .iter()
                .map(|(n, m)| format!("{n} {m:.4}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn operators_preserve_validity() -> Outcome {
    let mut bad = Vec::new();
    let mut applied = 0;
    for op in Operator::ALL {
        for i in 0..OPERATOR_APPLICATIONS {
            let ft = random_tree(i, 10);
            let other = random_tree(i + 1_000_000, 10);
            let ctx = context(10, true);
            let mut rng = ChaCha8Rng::seed_from_u64(i);
            let children: Vec<FaultTree> = if op == Operator::Crossover {
                crossover(&ft, &other, &ctx, &mut rng)
                    .map(|(a, b)| vec![a, b])
                    .unwrap_or_default()
            } else {
                op.apply(&ft, &ctx, &mut rng).into_iter().collect()
            };
            applied += children.len();
            for c in children {
                let v = c.validate();
                if !v.is_empty() {
                    bad.push(format!("{op}: {v:?}"));
                }
            }
        }
    }
    (
        bad.is_empty(),
        format!(
            "{} invalid results out of {applied} offspring from {} applications per operator{}",
            bad.len(),
            OPERATOR_APPLICATIONS,
            bad.first().map(|b| format!("; first: {b}")).unwrap_or_default()
        ),
    )
}

/// Every assignment of `vars` as a lookup closure input.
fn assignments(vars: &[NodeId]) -> impl Iterator<Item = std::collections::HashMap<NodeId, bool>> + '_ {
    (0u64..1 << vars.len()).map(move |r| {
        vars.iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), r >> i & 1 == 1))
            .collect()
    })
}

fn normal_forms_match_truth_tables() -> Outcome {
    let mut mismatches = 0;
    let mut skipped = 0;
    for i in 0..NORMAL_FORM_TREES {
        let ft = random_tree(10_000 + i, NORMAL_FORM_MAX_BES);
        let vars: Vec<NodeId> = ft.basic_events().iter().cloned().collect();
        for form in [Form::Dnf, Form::Cnf] {
            let nf = match to_normal_form(&ft, form) {
                Ok(nf) => nf,
                Err(_) => {
                    skipped += 1;
                    continue;
                }
            };
            for env in assignments(&vars) {
                let expected = ft.evaluate(&env).unwrap();
                if nf.evaluate_with(|id| env.get(id).copied().unwrap_or(false)) != expected {
                    mismatches += 1;
                    break;
                }
            }
        }
    }
    (
        mismatches == 0 && skipped == 0,
        format!(
            "{mismatches} mismatching forms, {skipped} capacity refusals over {} trees",
            NORMAL_FORM_TREES
        ),
    )
}

/// All `k`-element subsets of `items`.
fn subsets(items: &[NodeId], k: usize) -> BTreeSet<BTreeSet<NodeId>> {
    let n = items.len();
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| items[i].clone()).collect())
        .collect()
}

fn at_least_expansion() -> Outcome {
    let mut checked = 0;
    let mut wrong = Vec::new();
    for n in 1..=MAX_AT_LEAST_ARITY {
        let inputs: Vec<NodeId> = (1..=n).map(|i| NodeId::new(&format!("B{i}"))).collect();
        for k in 1..=GateKind::max_k(n) as usize {
            let ft = FaultTree::single_gate("T", GateKind::AtLeast(k as u32), inputs.iter().cloned());
            let dnf = to_normal_form(&ft, Form::Dnf).unwrap();
            let cnf = to_normal_form(&ft, Form::Cnf).unwrap();
            // k-of-n fails iff some k events fail, and holds off iff some
            // n-k+1 events all hold off.
            if dnf.clauses != subsets(&inputs, k) || cnf.clauses != subsets(&inputs, n - k + 1) {
                wrong.push(format!("{k}of{n}"));
            }
            checked += 1;
        }
    }
    (
        wrong.is_empty(),
        format!("{checked} (k, N) pairs checked, mismatches: {wrong:?}"),
    )
}

/// The top gate with its inputs over bare child gates, which leaves the
/// run plenty of generations to break it in.
fn shallow_skeleton(ft: &FaultTree) -> Skeleton {
    let top = &ft.gates()[ft.top()];
    let mut builder = FaultTree::builder(ft.top()).gate(ft.top(), top.kind, top.inputs.iter().cloned());
    for child in top.inputs.iter().filter(|c| ft.is_gate(c)) {
        builder = builder.gate(child, ft.gates()[child].kind, Vec::<NodeId>::new());
    }
    Skeleton::new(builder.build_unchecked()).unwrap()
}

fn skeleton_preserved_in_traces() -> Outcome {
    let mut violations = 0;
    let mut generations = 0;
    for (i, spec) in generated_specs(SKELETON_TRACES, 8, 10, SUITE_SEED + 5).iter().enumerate() {
        let target = generate_ft(spec).unwrap();
        let data = full_truth_table(&target).unwrap();
        let sk = shallow_skeleton(&target);
        let cfg = EaConfig { seed: i as u64, ..Default::default() };
        run_partial_observed(&data, &sk, &cfg, |_, pop| {
            generations += 1;
            violations += pop.iter().filter(|ind| !contains_skeleton(&ind.ft, &sk)).count();
        })
        .unwrap();
    }
    (
        violations == 0,
        format!("{violations} individuals missing the skeleton across {generations} generations of {SKELETON_TRACES} runs"),
    )
}

fn serialization_round_trip() -> Outcome {
    let mut failures = 0;
    for i in 0..ROUND_TRIP_TREES {
        let mut ft = random_tree(20_000 + i, 12);
        for (j, b) in ft.basic_events().clone().iter().enumerate() {
            if j % 2 == 0 {
                ft.set_probability(b, (j as f64 + 1.0) / 64.0);
            }
        }
        let text = galileo::serialize(&ft);
        match galileo::parse(&text) {
            Ok(back) if back == ft && galileo::serialize(&back) == text => {}
            _ => failures += 1,
        }
    }
    (
        failures == 0,
        format!("{failures} of {ROUND_TRIP_TREES} trees failed to round-trip"),
    )
}

fn identical_reruns() -> Outcome {
    let mut differing = 0;
    for i in 0..RERUN_TRIPLES {
        let data: Dataset = if i == 0 {
            lamp_data()
        } else {
            full_truth_table(&generate_ft(&GenSpec::new(5 + i as usize, 3, i)).unwrap()).unwrap()
        };
        let cfg = EaConfig {
            seed: 100 + i,
            selection: if i % 2 == 0 { Selection::Elitist } else { Selection::Tournament(3) },
            ..Default::default()
        };
        let a = evo::run(&data, &cfg).unwrap();
        let b = evo::run(&data, &cfg).unwrap();
        if a.trace.to_json() != b.trace.to_json()
            || a.trace.to_csv() != b.trace.to_csv()
            || galileo::serialize(&a.best) != galileo::serialize(&b.best)
            || galileo::serialize(&a.best_raw) != galileo::serialize(&b.best_raw)
        {
            differing += 1;
        }
    }
    (
        differing == 0,
        format!("{differing} of {RERUN_TRIPLES} (dataset, config, seed) triples differ between reruns"),
    )
}

fn survival_statistics() -> Outcome {
    let mut mismatches = 0;
    let mut over = 0;
    let mut rows = 0;
    for i in 0..SURVIVAL_TRACES {
        let data = if i == 0 {
            lamp_data()
        } else {
            full_truth_table(&generate_ft(&GenSpec::new(6 + i as usize, 3, 50 + i)).unwrap()).unwrap()
        };
        let cfg = EaConfig { seed: i, ..Default::default() };
        let mut logs: Vec<Vec<(evo::Origin, usize)>> = Vec::new();
        let result = run_observed(&data, &cfg, |_, pop| {
            logs.push(pop.iter().map(|ind| (ind.origin, ind.birth)).collect());
        })
        .unwrap();
        let table = operator_survival_stats(&result.trace);
        if logs.len() != table.rows.len() {
            mismatches += 1;
            continue;
        }
        for ((it, row), log) in table.iterations.iter().zip(&table.rows).zip(&logs) {
            rows += 1;
            for (origin, &count) in table.origins.iter().zip(row) {
                let recount = log.iter().filter(|(o, b)| o == origin && b == it).count();
                if recount != count {
                    mismatches += 1;
                }
            }
            if row.iter().sum::<usize>() > cfg.population_size {
                over += 1;
            }
        }
    }
    (
        mismatches == 0 && over == 0,
        format!(
            "{mismatches} count mismatches and {over} rows above the population size across \
             {rows} iterations of {SURVIVAL_TRACES} runs"
        ),
    )
}
