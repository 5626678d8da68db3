//! Random trees, sampled data, and the experiment suites.

mod generate;
mod report;
mod suites;

pub use generate::{generate_ft, sample_dataset, GenSpec, KindTag};
pub use report::{mean, median, Aggregate, CaseResult, ExperimentReport};
pub use suites::{
    derive_seed, first_iteration_reaching, generated_specs, run_accuracy_suite,
    run_benchmark_suite, run_noise_suite, run_selection_suite, two_layer_skeleton, DataMode,
    SuiteSettings, FULL_TABLE_TEST_LIMIT, MIN_POSITIVES,
};
