use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::scenario::{ensure_dir, write_manifest, Manifest, CODE_VERSION};
use crate::dynamics::{exact_rate, format_value};
use crate::error::{Error, Result};
use crate::fock::expectation_real;
use crate::model::{build_interaction_hamiltonian, build_observable, ModelParams, ObservableKind};
use crate::moments::{k1_rate, SignMode};
use crate::states::build_state;

/// How `dk1/dt` at `t = 0` is obtained for each particle number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "backend", content = "sign_mode")]
pub enum RateBackend {
    /// `⟨-i [K1, H]⟩` on the exact initial state.
    Exact,
    /// The closed moment equation with the given sign.
    Moments(SignMode),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub rms_residual: f64,
}

/// Least-squares line through `(x, y)`.
pub fn fit_affine(x: &[f64], y: &[f64]) -> Result<AffineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::TooFewNValues(x.len().min(y.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("fit needs at least two distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - (intercept + slope * a)).collect();
    Ok(AffineFit {
        slope,
        intercept,
        max_residual: residuals.iter().fold(0.0, |acc, r| acc.max(r.abs())),
        rms_residual: (residuals.iter().map(|r| r * r).sum::<f64>() / n).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub rate: f64,
    pub k2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub backend: RateBackend,
    pub points: Vec<ScalingPoint>,
    pub fit: AffineFit,
    /// Mean initial `k2` over the sweep.
    pub k2: f64,
    pub predicted_slope_as_printed: f64,
    pub predicted_slope_opposite: f64,
    /// Sign of `slope / k2`; `0` when either vanishes.
    pub measured_sign: f64,
    pub consistent_sign_mode: Option<SignMode>,
    /// `| |slope| - 2 g |k2| | / (2 g |k2|)`.
    pub relative_slope_error: f64,
}

fn check_n_values(n_values: &[usize]) -> Result<()> {
    if n_values.len() < 3 {
        return Err(Error::TooFewNValues(n_values.len()));
    }
    if n_values[0] < 2 {
        return Err(Error::Config("sweep needs N >= 2 so that k2 is defined".into()));
    }
    if n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("sweep N values must be strictly increasing".into()));
    }
    Ok(())
}

fn rate_at(base: &RunConfig, n: usize, backend: RateBackend) -> Result<ScalingPoint> {
    let params = ModelParams {
        n_particles: n,
        ..base.params
    };
    params.validate()?;
    let space = params.space()?;
    let state = build_state(&space, &base.recipe)?;
    let k2 = expectation_real(&state, &build_observable(&params, &space, ObservableKind::K2)?)?;
    let rate = match backend {
        RateBackend::Exact => {
            let h = build_interaction_hamiltonian(&params, &space)?;
            let k1 = build_observable(&params, &space, ObservableKind::K1)?;
            exact_rate(&state, &k1, &h)?
        }
        RateBackend::Moments(mode) => k1_rate(&params, k2, mode),
    };
    Ok(ScalingPoint { n, rate, k2 })
}

pub fn sweep_with_backend(base: &RunConfig, n_values: &[usize], backend: RateBackend) -> Result<ScalingReport> {
    check_n_values(n_values)?;
    base.recipe.validate()?;
    let points = n_values
        .par_iter()
        .map(|&n| rate_at(base, n, backend))
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.rate).collect();
    let fit = fit_affine(&x, &y)?;
    let k2 = points.iter().map(|p| p.k2).sum::<f64>() / points.len() as f64;
    let g = base.params.coupling;
    let ratio = fit.slope / k2;
    let measured_sign = if ratio.is_finite() && ratio != 0.0 { ratio.signum() } else { 0.0 };
    let reference = 2.0 * g * k2.abs();
    Ok(ScalingReport {
        backend,
        points,
        fit,
        k2,
        predicted_slope_as_printed: -2.0 * g * k2,
        predicted_slope_opposite: 2.0 * g * k2,
        measured_sign,
        consistent_sign_mode: SignMode::from_sign(measured_sign),
        relative_slope_error: (fit.slope.abs() - reference).abs() / reference,
    })
}

/// Exact initial `dk1/dt` against `N`.
pub fn sweep_collective_scaling(base: &RunConfig, n_values: &[usize]) -> Result<ScalingReport> {
    sweep_with_backend(base, n_values, RateBackend::Exact)
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub report: ScalingReport,
    pub scaling_path: PathBuf,
    pub report_path: PathBuf,
}

/// Exact sweep writing `scaling.csv`, `report.json` and `manifest.json`.
pub fn run_sweep(base: &RunConfig, n_values: &[usize]) -> Result<SweepOutcome> {
    let start = Instant::now();
    let report = sweep_collective_scaling(base, n_values)?;
    let dir = &base.output_dir;
    ensure_dir(dir)?;
    let mut csv = String::from("N,rate\n");
    for p in &report.points {
        csv.push_str(&format!("{},{}\n", p.n, format_value(p.rate)));
    }
    let scaling_path = dir.join("scaling.csv");
    std::fs::write(&scaling_path, csv)?;
    let report_path = dir.join("report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)? + "\n")?;
    write_manifest(
        dir,
        &Manifest {
            command: "sweep-n",
            code_version: CODE_VERSION,
            config: base,
            truncation_guard: None,
            wall_time_seconds: start.elapsed().as_secs_f64(),
            outputs: vec!["scaling.csv".into(), "report.json".into()],
            notes: vec![],
        },
    )?;
    Ok(SweepOutcome {
        report,
        scaling_path,
        report_path,
    })
}
