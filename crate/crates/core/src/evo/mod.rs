//! The evolutionary learner.

mod config;
mod engine;
pub mod operators;
mod select;

pub use config::{EaConfig, Selection};
pub use engine::{
    operator_survival_stats, run, run_observed, seed_population, Individual, IterationStats,
    Origin, RunResult, RunTrace, SurvivalTable, Termination,
};
pub(crate) use engine::Engine;
pub use operators::{
    be_connect, be_disconnect, be_swap, crossover, g_create, g_delete, g_mutate, k_n_change,
    Operator, OperatorContext,
};
pub use select::{elitist_order, select_indices};
