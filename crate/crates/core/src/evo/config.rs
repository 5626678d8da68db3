use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FtError, Result};

/// How survivors are drawn from parents plus offspring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    Elitist,
    Roulette,
    Sus,
    Tournament(usize),
    Random,
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selection::Elitist => f.write_str("elitist"),
            Selection::Roulette => f.write_str("roulette"),
            Selection::Sus => f.write_str("sus"),
            Selection::Tournament(k) => write!(f, "tournament:{k}"),
            Selection::Random => f.write_str("random"),
        }
    }
}

impl FromStr for Selection {
    type Err = FtError;

    /// Accepts `elitist`, `roulette`, `sus`, `random`, `tournament` (size 2)
    /// and `tournament:<size>`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "elitist" | "elitism" => Ok(Selection::Elitist),
            "roulette" => Ok(Selection::Roulette),
            "sus" => Ok(Selection::Sus),
            "random" => Ok(Selection::Random),
            "tournament" => Ok(Selection::Tournament(2)),
            _ => lower
                .strip_prefix("tournament:")
                .and_then(|k| k.parse().ok())
                .map(Selection::Tournament)
                .ok_or_else(|| FtError::Input(format!("unknown selection strategy `{s}`"))),
        }
    }
}

/// Search hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EaConfig {
    pub population_size: usize,
    pub operator_probability: f64,
    pub max_iterations: usize,
    pub convergence_window: usize,
    pub target_fitness: f64,
    pub selection: Selection,
    /// Offspring with more gates are discarded. `None` means `4 * |V|`.
    pub max_gates: Option<usize>,
    pub enable_kn_gates: bool,
    pub seed: u64,
}

impl Default for EaConfig {
    fn default() -> Self {
        EaConfig {
            population_size: 100,
            operator_probability: 0.9,
            max_iterations: 100,
            convergence_window: 10,
            target_fitness: 1.0,
            selection: Selection::Elitist,
            max_gates: None,
            enable_kn_gates: false,
            seed: 0,
        }
    }
}

impl EaConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(FtError::Input(m));
        if self.population_size == 0 {
            return fail("population size must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.operator_probability) {
            return fail(format!(
                "operator probability {} outside [0, 1]",
                self.operator_probability
            ));
        }
        if self.max_iterations == 0 {
            return fail("max iterations must be positive".into());
        }
        if self.convergence_window == 0 || self.convergence_window > self.max_iterations {
            return fail(format!(
                "convergence window {} must lie in [1, max iterations = {}]",
                self.convergence_window, self.max_iterations
            ));
        }
        if !(self.target_fitness > 0.0 && self.target_fitness <= 1.0) {
            return fail(format!("target fitness {} outside (0, 1]", self.target_fitness));
        }
        if let Selection::Tournament(k) = self.selection {
            if k < 2 {
                return fail(format!("tournament size {k} must be at least 2"));
            }
        }
        if self.max_gates == Some(0) {
            return fail("max gates must be positive".into());
        }
        Ok(())
    }

    pub fn gate_cap(&self, variables: usize) -> usize {
        self.max_gates.unwrap_or(4 * variables).max(1)
    }
}
