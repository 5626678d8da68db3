use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ftevolve_core::{EaConfig, FtError, Selection};

use crate::EaArgs;

/// Exit status 1 for bad invocations, 2 for unreadable or invalid inputs.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}\n\nFor more information, try '--help'."),
            CliError::Input(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<FtError> for CliError {
    fn from(e: FtError) -> Self {
        CliError::Input(e.into())
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Input(e)
    }
}

pub fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

pub const EA_KEYS: [&str; 9] = [
    "pop", "iters", "conv", "op-prob", "selection", "kn", "max-gates", "seed", "threads",
];

pub const SEED_ENV: &str = "FTEVOLVE_SEED";

/// A flat `key=value` file whose keys are flag names without the dashes.
/// Blank lines and lines starting with `#` are ignored.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>, allowed: &[&str]) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(anyhow::anyhow!("reading {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                usage(format!("{}:{}: expected key=value", path.display(), i + 1))
            })?;
            let key = key.trim().replace('_', "-");
            if !allowed.contains(&key.as_str()) {
                return Err(usage(format!("{}:{}: unknown key `{key}`", path.display(), i + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    /// The value under `key`; empty values and `auto` count as unset.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.values
            .get(key)
            .filter(|v| !v.is_empty() && v.as_str() != "auto")
            .map(|v| v.parse().map_err(|_| usage(format!("config: invalid value `{v}` for `{key}`"))))
            .transpose()
    }

    /// The flag value, else the file value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

/// Seed precedence: flag, config file, environment, 0.
pub fn resolve_seed(flag: Option<u64>, file: &ConfigFile) -> Result<u64, CliError> {
    if let Some(s) = file.pick(flag, "seed")? {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{SEED_ENV}: invalid seed `{v}`"))),
        Err(_) => Ok(0),
    }
}

pub struct Resolved {
    pub cfg: EaConfig,
    pub threads: Option<usize>,
}

pub fn resolve_ea(args: &EaArgs, file: &ConfigFile) -> Result<Resolved, CliError> {
    let d = EaConfig::default();
    let selection = match file.pick(args.selection.clone(), "selection")? {
        Some(s) => Selection::from_str(&s).map_err(|e| usage(e.to_string()))?,
        None => d.selection,
    };
    let cfg = EaConfig {
        population_size: file.pick(args.pop, "pop")?.unwrap_or(d.population_size),
        max_iterations: file.pick(args.iters, "iters")?.unwrap_or(d.max_iterations),
        convergence_window: file.pick(args.conv, "conv")?.unwrap_or(d.convergence_window),
        operator_probability: file.pick(args.op_prob, "op-prob")?.unwrap_or(d.operator_probability),
        selection,
        enable_kn_gates: args.kn || file.get("kn")?.unwrap_or(false),
        max_gates: file.pick(args.max_gates, "max-gates")?.or(d.max_gates),
        seed: resolve_seed(args.seed, file)?,
        ..d
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let threads = file.pick(args.threads, "threads")?;
    if threads == Some(0) {
        return Err(usage("--threads must be at least 1"));
    }
    Ok(Resolved { cfg, threads })
}

/// Apply `--threads` to the global worker pool.
pub fn apply_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // Only fails if the pool was already built, which leaves it as is.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Lines of `key=value` in the order given.
pub fn render(entries: &[(&str, String)]) -> String {
    entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

pub fn ea_entries(r: &Resolved) -> Vec<(&'static str, String)> {
    let c = &r.cfg;
    vec![
        ("pop", c.population_size.to_string()),
        ("iters", c.max_iterations.to_string()),
        ("conv", c.convergence_window.to_string()),
        ("op-prob", c.operator_probability.to_string()),
        ("selection", c.selection.to_string()),
        ("kn", c.enable_kn_gates.to_string()),
        ("max-gates", c.max_gates.map_or("auto".into(), |g| g.to_string())),
        ("seed", c.seed.to_string()),
        ("threads", r.threads.map_or("auto".into(), |t| t.to_string())),
    ]
}
