use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use super::config::RunConfig;
use super::scenario::{ensure_dir, resolve_closure, simulate_exact, write_manifest, ExactRun, Manifest, CODE_VERSION};
use crate::dynamics::format_value;
use crate::error::Result;
use crate::guard::GuardReport;
use crate::moments::{integrate_moment_equations, MomentSeries, MomentState, SignMode};

/// Error of one sign mode against the exact `m(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignModeError {
    pub sign_mode: SignMode,
    pub max_abs_error: f64,
    /// Over the first quarter of the samples, where the closure is trusted.
    pub early_max_abs_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub initial: MomentState,
    pub errors: Vec<SignModeError>,
    /// Mode with the smaller early error; `None` on an exact tie.
    pub winner: Option<SignMode>,
    pub truncation_guard: GuardReport,
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub report: CompareReport,
    pub exact_m: Vec<f64>,
    pub moments: ModeSeries,
    pub compare_path: PathBuf,
    pub report_path: PathBuf,
}

/// Number of leading samples forming the early window.
pub fn early_window_len(n_samples: usize) -> usize {
    (n_samples / 4).max(2).min(n_samples)
}

fn max_abs_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Moment-equation series per sign mode.
pub type ModeSeries = Vec<(SignMode, MomentSeries)>;

/// Runs the exact model and the moment equations under both sign modes
/// without writing anything.
pub fn compare_runs(config: &RunConfig) -> Result<(ExactRun, CompareReport, ModeSeries)> {
    let exact = simulate_exact(config)?;
    let init = exact.initial_moments()?;
    let exact_m = exact.series.column(|r| r.m);
    let early = early_window_len(exact_m.len());
    let mut moments = Vec::new();
    let mut errors = Vec::new();
    for mode in [SignMode::AsPrinted, SignMode::Opposite] {
        let closure = resolve_closure(config, &init, Some(&exact), Some(mode))?;
        let series = integrate_moment_equations(&init, &config.params, &closure, &config.grid)?;
        let m = series.m();
        errors.push(SignModeError {
            sign_mode: mode,
            max_abs_error: max_abs_error(&m, &exact_m),
            early_max_abs_error: max_abs_error(&m[..early], &exact_m[..early]),
        });
        moments.push((mode, series));
    }
    let winner = match errors[0].early_max_abs_error.partial_cmp(&errors[1].early_max_abs_error) {
        Some(std::cmp::Ordering::Less) => Some(errors[0].sign_mode),
        Some(std::cmp::Ordering::Greater) => Some(errors[1].sign_mode),
        _ => None,
    };
    let report = CompareReport {
        initial: init,
        errors,
        winner,
        truncation_guard: exact.guard.clone(),
    };
    Ok((exact, report, moments))
}

/// Writes `compare.csv` (exact `m` next to both closures), `report.json`
/// and `manifest.json`.
pub fn compare_exact_vs_moments(config: &RunConfig) -> Result<CompareOutcome> {
    let start = Instant::now();
    let (exact, report, moments) = compare_runs(config)?;
    let exact_m = exact.series.column(|r| r.m);
    let dir = &config.output_dir;
    ensure_dir(dir)?;

    let mut csv = String::from("t,m_exact,m_as_printed,m_opposite,k2_exact\n");
    for (k, row) in exact.series.rows.iter().enumerate() {
        let cells = [row.t, exact_m[k], moments[0].1.rows[k].m, moments[1].1.rows[k].m, row.k2].map(format_value);
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    let compare_path = dir.join("compare.csv");
    std::fs::write(&compare_path, csv)?;
    let report_path = dir.join("report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)? + "\n")?;
    write_manifest(
        dir,
        &Manifest {
            command: "compare",
            code_version: CODE_VERSION,
            config,
            truncation_guard: Some(&report.truncation_guard),
            wall_time_seconds: start.elapsed().as_secs_f64(),
            outputs: vec!["compare.csv".into(), "report.json".into()],
            notes: vec![],
        },
    )?;
    Ok(CompareOutcome {
        report,
        exact_m,
        moments,
        compare_path,
        report_path,
    })
}
