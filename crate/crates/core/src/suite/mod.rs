//! Executable registry of the inequalities, random ensembles, and the
//! campaign runner.

mod checks;
mod ensemble;
mod ids;
mod runner;

pub use checks::{positivity_applies, run_check, CheckResult, Extras, Witness, LIMIT_RHOS, T_SET};
pub use ensemble::{generate_matrix, sample_seed, CheckSettings, EnsembleConfig, Family, SampleAux};
pub use ids::{enumerate_checks, parse_check_list, CheckId};
pub use runner::{check_matrix, evaluate_sample, run_suite, search_counterexamples, CheckSummary, SuiteReport};
