//! Reproducible runs built on the library: configuration, exact scenarios,
//! exact-versus-moments comparison, particle-number sweeps, cavity decay and
//! the validation suite. Every run writes its outputs plus a `manifest.json`
//! into the configured output directory.

pub mod compare;
pub mod config;
pub mod scenario;
pub mod sweep;
pub mod validate;

pub use compare::{compare_exact_vs_moments, compare_runs, CompareOutcome, CompareReport, SignModeError};
pub use config::{ClosureSection, DecaySection, K2Source, RunConfig};
pub use scenario::{
    run_decay, run_rates, run_scenario, simulate_exact, simulate_exact_with, DecayOutcome, ExactRun, RatesOutcome,
    ScenarioOutcome,
};
pub use sweep::{
    fit_affine, run_sweep, sweep_collective_scaling, sweep_with_backend, AffineFit, RateBackend, ScalingPoint,
    ScalingReport, SweepOutcome,
};
pub use validate::{run_validation, validate_suite, validate_suite_with_hamiltonian, ValidationCheck, ValidationReport};
