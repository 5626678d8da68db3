use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use ftevolve_core::evo::{operator_survival_stats, RunTrace};
use ftevolve_core::skeleton::run_partial;
use ftevolve_core::synth::{
    derive_seed, generate_ft, generated_specs, mean, median, run_accuracy_suite,
    run_benchmark_suite, run_noise_suite, run_selection_suite, sample_dataset, DataMode,
    ExperimentReport, GenSpec, KindTag, SuiteSettings,
};
use ftevolve_core::{
    full_truth_table, galileo, run, to_normal_form, Dataset, FaultTree, Form, Selection, Skeleton,
    SplitSpec,
};

use crate::output::{emit, write_all};
use crate::settings::{
    apply_threads, ea_entries, render, resolve_ea, resolve_seed, usage, CliError, ConfigFile,
    EA_KEYS,
};
use crate::{BenchArgs, EvalArgs, GenDataArgs, GenFtArgs, LearnArgs, NormalizeArgs, StatsArgs};

type Result<T> = std::result::Result<T, CliError>;

const DEFAULT_SPLIT: f64 = 0.667;
const BENCHMARK_RECORDS: u64 = 100_000;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Input)
}

fn load_tree(path: &Path) -> Result<FaultTree> {
    galileo::parse(&read(path)?)
        .map_err(|e| CliError::Input(anyhow!("{}:{e}", path.display())))
}

fn load_data(path: &Path, top: &str) -> Result<Dataset> {
    Dataset::from_csv(&read(path)?, top)
        .map_err(|e| CliError::Input(anyhow!("{}: {e}", path.display())))
}

fn check_split(split: f64) -> Result<f64> {
    if split > 0.0 && split <= 1.0 {
        Ok(split)
    } else {
        Err(usage(format!("--split must lie in (0, 1], got {split}")))
    }
}

pub fn learn(args: LearnArgs) -> Result<()> {
    let mut keys = vec!["data", "top", "skeleton", "split", "out"];
    keys.extend(EA_KEYS);
    let file = ConfigFile::load(args.ea.config.as_deref(), &keys)?;
    let data_path: PathBuf = file
        .pick(args.data, "data")?
        .ok_or_else(|| usage("the following required arguments were not provided:\n  --data <DATA>"))?;
    let top: String = file
        .pick(args.top, "top")?
        .ok_or_else(|| usage("the following required arguments were not provided:\n  --top <TOP>"))?;
    let skeleton_path: Option<PathBuf> = file.pick(args.skeleton, "skeleton")?;
    let split = check_split(file.pick(args.split, "split")?.unwrap_or(DEFAULT_SPLIT))?;
    let out: PathBuf = file.pick(args.out, "out")?.unwrap_or_else(|| "out".into());
    let resolved = resolve_ea(&args.ea, &file)?;
    apply_threads(resolved.threads);
    let cfg = &resolved.cfg;

    let data = load_data(&data_path, &top)?;
    let (train, test) = if split < 1.0 {
        let spec = SplitSpec::new(split, derive_seed(cfg.seed, 0, 1))?;
        let (tr, te) = data.split(&spec)?;
        (tr, Some(te))
    } else {
        (data, None)
    };
    let result = match &skeleton_path {
        Some(p) => {
            let sk = Skeleton::new(load_tree(p)?)?;
            sk.check_variables(train.variables(), train.top_variable())?;
            run_partial(&train, &sk, cfg)?
        }
        None => run(&train, cfg)?,
    };

    let mut entries: Vec<(&str, String)> = vec![
        ("data", data_path.display().to_string()),
        ("top", top.clone()),
        ("skeleton", skeleton_path.as_ref().map_or(String::new(), |p| p.display().to_string())),
        ("split", split.to_string()),
        ("out", out.display().to_string()),
    ];
    entries.extend(ea_entries(&resolved));
    write_all(
        &out,
        &[
            ("best.ft", galileo::serialize(&result.best_raw)),
            ("best.cnf.ft", galileo::serialize(&result.best)),
            ("trace.csv", result.trace.to_csv()),
            ("trace.json", result.trace.to_json()),
            ("config.resolved", render(&entries)),
        ],
    )?;

    println!("fitness {:.6}", result.best_fitness);
    if let Some(test) = test {
        println!("test_accuracy {:.6}", test.bit_table().fitness(&result.best)?);
    }
    println!(
        "iterations {} ({})",
        result.trace.iterations_run, result.trace.termination
    );
    println!("wrote {}", out.display());
    Ok(())
}

fn parse_kinds(text: &str) -> Result<Vec<KindTag>> {
    text.split(',')
        .map(|k| match k.trim().to_ascii_lowercase().as_str() {
            "and" => Ok(KindTag::And),
            "or" => Ok(KindTag::Or),
            "atleast" | "kn" | "vot" => Ok(KindTag::AtLeast),
            other => Err(usage(format!("unknown gate kind `{other}`"))),
        })
        .collect()
}

pub fn gen_ft(args: GenFtArgs) -> Result<()> {
    let spec = GenSpec {
        num_bes: args.bes,
        num_gates: args.gates,
        kinds: parse_kinds(&args.kinds)?,
        be_prob_range: (args.prob_min, args.prob_max),
        seed: resolve_seed(args.seed, &ConfigFile::default())?,
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let ft = generate_ft(&spec)?;
    emit(args.out.as_deref(), &galileo::serialize(&ft))?;
    Ok(())
}

pub fn gen_data(args: GenDataArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.noise) {
        return Err(usage(format!("--noise must lie in [0, 1], got {}", args.noise)));
    }
    let seed = resolve_seed(args.seed, &ConfigFile::default())?;
    let ft = load_tree(&args.ft)?;
    let clean = if args.full {
        full_truth_table(&ft)?
    } else {
        sample_dataset(&ft, args.records, derive_seed(seed, 0, 4))?
    };
    let data = clean.inject_noise(args.noise, derive_seed(seed, 0, 3))?;
    emit(args.out.as_deref(), &data.to_csv())?;
    Ok(())
}

pub fn eval(args: EvalArgs) -> Result<()> {
    let ft = load_tree(&args.ft)?;
    let data = load_data(&args.data, &args.top)?;
    println!("{:.6}", data.bit_table().fitness(&ft)?);
    Ok(())
}

pub fn normalize(args: NormalizeArgs) -> Result<()> {
    let ft = load_tree(&args.ft)?;
    let form = if args.form == "dnf" { Form::Dnf } else { Form::Cnf };
    emit(args.out.as_deref(), &to_normal_form(&ft, form)?.to_text())?;
    Ok(())
}

pub fn stats(args: StatsArgs) -> Result<()> {
    let trace = RunTrace::from_json(&read(&args.trace)?)
        .map_err(|e| CliError::Input(anyhow!("{}: {e}", args.trace.display())))?;
    emit(args.out.as_deref(), &operator_survival_stats(&trace).to_csv())?;
    Ok(())
}

fn parse_levels(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|l| {
            l.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| (0.0..=1.0).contains(v))
                .ok_or_else(|| usage(format!("invalid noise level `{l}`")))
        })
        .collect()
}

/// Best fitness per iteration for every case, in long format.
fn curves_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("case,variant,iteration,best_fitness\n");
    for c in &report.cases {
        for (i, f) in c.curve.iter().enumerate() {
            let _ = writeln!(out, "{},{},{i},{f}", c.case, c.variant);
        }
    }
    out
}

fn benchmark_files(dir: &Path) -> Result<Vec<(String, String)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ft"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Input(anyhow!("no .ft files in {}", dir.display())));
    }
    paths
        .iter()
        .map(|p| {
            let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok((name, read(p)?))
        })
        .collect()
}

pub fn bench(args: BenchArgs) -> Result<()> {
    let mut keys = vec![
        "suite", "seeds", "min-bes", "max-bes", "bes", "gates", "with-skeleton", "noise-levels",
        "records", "split", "ft-dir", "out",
    ];
    keys.extend(EA_KEYS);
    let file = ConfigFile::load(args.ea.config.as_deref(), &keys)?;
    let suite: String = file
        .pick(args.suite, "suite")?
        .ok_or_else(|| usage("the following required arguments were not provided:\n  --suite <SUITE>"))?;
    let seeds: usize = file.pick(args.seeds, "seeds")?.unwrap_or(10);
    let min_bes: usize = file.pick(args.min_bes, "min-bes")?.unwrap_or(6);
    let max_bes: usize = file.pick(args.max_bes, "max-bes")?.unwrap_or(8);
    let bes: usize = file.pick(args.bes, "bes")?.unwrap_or(8);
    let gates: usize = file.pick(args.gates, "gates")?.unwrap_or(4);
    let with_skeleton = args.with_skeleton || file.get("with-skeleton")?.unwrap_or(false);
    let levels_text: String = file
        .pick(args.noise_levels, "noise-levels")?
        .unwrap_or_else(|| "0,0.01,0.03,0.05".into());
    let levels = parse_levels(&levels_text)?;
    let records: Option<u64> = file.pick(args.records, "records")?;
    let split = file.pick(args.split, "split")?.unwrap_or(DEFAULT_SPLIT);
    if !(split > 0.0 && split < 1.0) {
        return Err(usage(format!("--split must lie in (0, 1), got {split}")));
    }
    let ft_dir: Option<PathBuf> = file.pick(args.ft_dir, "ft-dir")?;
    let out: PathBuf = file.pick(args.out, "out")?.unwrap_or_else(|| "bench-out".into());
    if seeds == 0 || min_bes < 2 || max_bes < min_bes {
        return Err(usage("need --seeds >= 1 and 2 <= --min-bes <= --max-bes"));
    }
    let resolved = resolve_ea(&args.ea, &file)?;
    apply_threads(resolved.threads);

    let data = match records {
        Some(n) => DataMode::Sampled(n),
        None if suite == "benchmark" => DataMode::Sampled(BENCHMARK_RECORDS),
        None => DataMode::FullTable,
    };
    let settings = SuiteSettings {
        cfg: resolved.cfg.clone(),
        train_fraction: split,
        data,
    };
    let seed = settings.cfg.seed;
    let mut report = match suite.as_str() {
        "accuracy" => {
            let mut r = run_accuracy_suite(&generated_specs(seeds, min_bes, max_bes, seed), &settings, with_skeleton)?;
            r.thresholds.insert("median_test_accuracy_min".into(), 0.95);
            r.thresholds.insert("mean_test_accuracy_min".into(), 0.90);
            r
        }
        "noise" => {
            let mut r = run_noise_suite(&generated_specs(seeds, min_bes, max_bes, seed), &levels, &settings)?;
            r.thresholds.insert("mean_test_accuracy_at_max_noise_min".into(), 0.9);
            r
        }
        "selection" => {
            let strategies = [
                Selection::Elitist,
                Selection::Roulette,
                Selection::Sus,
                Selection::Tournament(2),
                Selection::Random,
            ];
            let spec = GenSpec::new(bes, gates, derive_seed(seed, 0, 5));
            spec.validate().map_err(|e| usage(e.to_string()))?;
            run_selection_suite(&spec, &strategies, seeds, &settings)?
        }
        "benchmark" => {
            let dir = ft_dir.as_deref().ok_or_else(|| usage("--suite benchmark needs --ft-dir"))?;
            let mut r = run_benchmark_suite(&benchmark_files(dir)?, &settings);
            r.thresholds.insert("min_positive_observations".into(), 100.0);
            r
        }
        other => {
            return Err(usage(format!(
                "unknown suite `{other}`; expected accuracy, noise, selection or benchmark"
            )))
        }
    };
    report.thresholds.insert("train_fraction".into(), split);

    let mut entries: Vec<(&str, String)> = vec![
        ("suite", suite.clone()),
        ("seeds", seeds.to_string()),
        ("min-bes", min_bes.to_string()),
        ("max-bes", max_bes.to_string()),
        ("bes", bes.to_string()),
        ("gates", gates.to_string()),
        ("with-skeleton", with_skeleton.to_string()),
        ("noise-levels", levels_text),
        ("records", records.map_or("auto".into(), |r| r.to_string())),
        ("split", split.to_string()),
        ("ft-dir", ft_dir.as_ref().map_or(String::new(), |p| p.display().to_string())),
        ("out", out.display().to_string()),
    ];
    entries.extend(ea_entries(&resolved));
    let dir = out.join(format!("seed-{seed}"));
    write_all(
        &dir,
        &[
            ("report.csv", report.to_csv()),
            ("report.json", report.to_json()),
            ("curves.csv", curves_csv(&report)),
            ("timings.csv", report.timings_csv()),
            ("config.resolved", render(&entries)),
        ],
    )?;

    println!("variant,cases,median_test_accuracy,mean_test_accuracy,mean_iterations");
    for a in &report.by_variant {
        println!(
            "{},{},{:.6},{:.6},{:.2}",
            a.group, a.cases, a.median_test_accuracy, a.mean_test_accuracy, a.mean_iterations
        );
    }
    for c in report.cases.iter().filter(|c| c.error.is_some() || c.warning.is_some()) {
        let note = c.error.as_deref().or(c.warning.as_deref()).unwrap_or_default();
        eprintln!("{} {}: {note}", c.name, c.variant);
    }
    if suite == "selection" {
        let acc = |v: &str| median(&report.cases_of(v).map(|c| c.test_accuracy).collect::<Vec<_>>());
        let others = ["roulette", "sus", "tournament:2", "random"];
        let best = others.iter().all(|o| acc("elitist") >= acc(o));
        println!("elitist median is highest: {best}");
    }
    if suite == "noise" {
        let means: Vec<f64> = levels
            .iter()
            .map(|l| mean(&report.cases_of(&format!("noise={l}")).map(|c| c.test_accuracy).collect::<Vec<_>>()))
            .collect();
        println!("accuracy non-increasing in noise: {}", means.windows(2).all(|w| w[1] <= w[0]));
    }
    println!("wrote {}", dir.display());
    Ok(())
}
