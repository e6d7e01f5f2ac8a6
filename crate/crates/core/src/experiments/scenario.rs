use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::config::{K2Source, RunConfig};
use crate::dynamics::{evolve, evolve_with_decay, observable_series_with, DecayRun, SeriesTable};
use crate::error::{Error, Result};
use crate::fock::{expectation_real, StateVector};
use crate::guard::{check_samples, GuardReport};
use crate::model::ModelOperators;
use crate::moments::{integrate_moment_equations, ClosureConfig, K2Closure, K2Series, MomentSeries, MomentState};
use crate::states::build_state;

/// Self-description written next to every run's outputs.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub code_version: &'a str,
    pub config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_guard: Option<&'a GuardReport>,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

pub(crate) fn write_manifest(dir: &Path, manifest: &Manifest<'_>) -> Result<PathBuf> {
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}

/// Exact propagation of a configuration, before anything is written.
#[derive(Debug, Clone)]
pub struct ExactRun {
    pub ops: ModelOperators,
    pub initial: StateVector,
    pub samples: Vec<StateVector>,
    pub series: SeriesTable,
    pub guard: GuardReport,
}

impl ExactRun {
    pub fn initial_moments(&self) -> Result<MomentState> {
        initial_moments(&self.ops, &self.initial)
    }
}

pub(crate) fn initial_moments(ops: &ModelOperators, state: &StateVector) -> Result<MomentState> {
    Ok(MomentState {
        m: expectation_real(state, &ops.m)?,
        k1: expectation_real(state, &ops.k1)?,
        k2: match &ops.k2 {
            Some(k2) => expectation_real(state, k2)?,
            None => 0.0,
        },
    })
}

pub fn simulate_exact(config: &RunConfig) -> Result<ExactRun> {
    config.validate()?;
    let ops = ModelOperators::build(&config.params)?;
    simulate_exact_with(config, ops)
}

/// As [`simulate_exact`] with prebuilt operators (the Hamiltonian may be
/// replaced by the caller).
pub fn simulate_exact_with(config: &RunConfig, ops: ModelOperators) -> Result<ExactRun> {
    let initial = build_state(&ops.space, &config.recipe)?;
    let samples = evolve(&initial, &ops.hamiltonian, &config.grid, config.tol)?;
    let series = observable_series_with(&ops, &config.grid, &samples)?;
    let guard = check_samples(&config.grid.times(), &samples)?;
    Ok(ExactRun {
        ops,
        initial,
        samples,
        series,
        guard,
    })
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub series: SeriesTable,
    pub guard: GuardReport,
    pub series_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Exact run writing `series.csv` and `manifest.json` into the configured
/// output directory. A failed truncation guard is reported in the outcome
/// and the manifest; the files are still written.
pub fn run_scenario(config: &RunConfig) -> Result<ScenarioOutcome> {
    let start = Instant::now();
    let run = simulate_exact(config)?;
    let dir = &config.output_dir;
    ensure_dir(dir)?;
    let series_path = dir.join("series.csv");
    std::fs::write(&series_path, run.series.to_csv())?;
    let manifest_path = write_manifest(
        dir,
        &Manifest {
            command: "run-exact",
            code_version: CODE_VERSION,
            config,
            truncation_guard: Some(&run.guard),
            wall_time_seconds: start.elapsed().as_secs_f64(),
            outputs: vec!["series.csv".into()],
            notes: vec![],
        },
    )?;
    Ok(ScenarioOutcome {
        series: run.series,
        guard: run.guard,
        series_path,
        manifest_path,
    })
}

/// Builds the closure the configuration asks for. `Exact` needs the exact
/// run, which is computed on demand.
pub(crate) fn resolve_closure(
    config: &RunConfig,
    init: &MomentState,
    exact: Option<&ExactRun>,
    sign_override: Option<crate::moments::SignMode>,
) -> Result<ClosureConfig> {
    let section = config.closure_section();
    let sign_mode = sign_override.unwrap_or(section.sign_mode);
    let k2_model = match &section.k2 {
        K2Source::Initial => K2Closure::Constant(init.k2),
        K2Source::Constant { value } => K2Closure::Constant(*value),
        K2Source::Csv { path } => K2Closure::TimeSeries(K2Series::from_csv_path(path)?),
        K2Source::Exact => {
            if config.params.n_particles < 2 {
                return Err(Error::UndefinedK2);
            }
            let owned;
            let run = match exact {
                Some(run) => run,
                None => {
                    owned = simulate_exact(config)?;
                    &owned
                }
            };
            let times = run.series.column(|r| r.t);
            let values = run.series.column(|r| r.k2);
            K2Closure::TimeSeries(K2Series::new(times, values)?)
        }
    };
    Ok(ClosureConfig { k2_model, sign_mode })
}

#[derive(Debug, Clone)]
pub struct RatesOutcome {
    pub initial: MomentState,
    pub closure: ClosureConfig,
    pub series: MomentSeries,
    pub rates_path: PathBuf,
}

/// Integrates the moment equations from the initial state's `m`, `k1`,
/// `k2` and writes `rates.csv` plus `manifest.json`.
pub fn run_rates(config: &RunConfig) -> Result<RatesOutcome> {
    let start = Instant::now();
    config.validate()?;
    let ops = ModelOperators::build(&config.params)?;
    let state = build_state(&ops.space, &config.recipe)?;
    let init = initial_moments(&ops, &state)?;
    let closure = resolve_closure(config, &init, None, None)?;
    let series = integrate_moment_equations(&init, &config.params, &closure, &config.grid)?;
    let dir = &config.output_dir;
    ensure_dir(dir)?;
    let rates_path = dir.join("rates.csv");
    std::fs::write(&rates_path, series.to_csv())?;
    let mut notes = Vec::new();
    if series.rows.iter().any(|r| r.m_negative) {
        notes.push("moment equations produced m < 0 (flagged rows in rates.csv)".into());
    }
    write_manifest(
        dir,
        &Manifest {
            command: "run-rates",
            code_version: CODE_VERSION,
            config,
            truncation_guard: None,
            wall_time_seconds: start.elapsed().as_secs_f64(),
            outputs: vec!["rates.csv".into()],
            notes,
        },
    )?;
    Ok(RatesOutcome {
        initial: init,
        closure,
        series,
        rates_path,
    })
}

#[derive(Debug, Clone)]
pub struct DecayOutcome {
    pub run: DecayRun,
    pub decay_path: PathBuf,
}

pub const DECAY_NOTE: &str =
    "cavity loss through a single collapse channel sqrt(kappa) c; an extension beyond the closed interaction Hamiltonian";

/// Quantum-jump run writing `decay.csv` (the series columns plus the mean
/// cumulative `emitted` photon count) and `manifest.json`.
pub fn run_decay(config: &RunConfig) -> Result<DecayOutcome> {
    let start = Instant::now();
    config.validate()?;
    let decay = config.decay_params()?;
    let ops = ModelOperators::build(&config.params)?;
    let state = build_state(&ops.space, &config.recipe)?;
    let run = evolve_with_decay(&state, &ops.hamiltonian, &decay, &config.grid, config.tol, &config.params)?;
    let dir = &config.output_dir;
    ensure_dir(dir)?;
    let decay_path = dir.join("decay.csv");
    std::fs::write(&decay_path, run.to_csv())?;
    write_manifest(
        dir,
        &Manifest {
            command: "decay",
            code_version: CODE_VERSION,
            config,
            truncation_guard: None,
            wall_time_seconds: start.elapsed().as_secs_f64(),
            outputs: vec!["decay.csv".into()],
            notes: vec![DECAY_NOTE.into()],
        },
    )?;
    Ok(DecayOutcome { run, decay_path })
}
