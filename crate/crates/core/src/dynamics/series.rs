use std::fmt::Write as _;

use serde::Serialize;

use super::TimeGrid;
use crate::error::{Error, Result};
use crate::fock::{expectation_real, StateVector};
use crate::model::{ModelOperators, ModelParams};

/// One sample of the collective observables. `k2` is NaN for `N = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesRow {
    pub t: f64,
    pub m: f64,
    pub k1: f64,
    pub k2: f64,
    pub n_photon: f64,
    pub norm_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SeriesTable {
    pub rows: Vec<SeriesRow>,
}

/// Fixed numeric format for every CSV the crate writes: scientific notation
/// with 17 significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

impl SeriesTable {
    pub const HEADER: &'static str = "t,m,k1,k2,n_photon,norm_drift";

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, pick: impl Fn(&SeriesRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(pick).collect()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.rows.iter().map(|r| r.norm_drift).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::HEADER);
        out.push('\n');
        for r in &self.rows {
            let cells = [r.t, r.m, r.k1, r.k2, r.n_photon, r.norm_drift].map(format_value);
            writeln!(out, "{}", cells.join(",")).expect("writing to a String");
        }
        out
    }

    /// Largest absolute difference between matching cells of two tables of
    /// equal shape. NaN cells must be NaN in both.
    pub fn max_abs_difference(&self, other: &Self) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        let mut worst = 0.0f64;
        for (a, b) in self.rows.iter().zip(&other.rows) {
            let pairs = [
                (a.t, b.t),
                (a.m, b.m),
                (a.k1, b.k1),
                (a.k2, b.k2),
                (a.n_photon, b.n_photon),
                (a.norm_drift, b.norm_drift),
            ];
            for (x, y) in pairs {
                match (x.is_nan(), y.is_nan()) {
                    (true, true) => {}
                    (false, false) => worst = worst.max((x - y).abs()),
                    _ => return None,
                }
            }
        }
        Some(worst)
    }
}

/// Evaluates `M`, `K1`, `K2`, `c†c` and the norm drift `| ||ψ|| - 1 |` on
/// every sample.
pub fn observable_series(grid: &TimeGrid, samples: &[StateVector], params: &ModelParams) -> Result<SeriesTable> {
    let ops = ModelOperators::build(params)?;
    observable_series_with(&ops, grid, samples)
}

/// As [`observable_series`] with operators that are already built.
pub fn observable_series_with(ops: &ModelOperators, grid: &TimeGrid, samples: &[StateVector]) -> Result<SeriesTable> {
    if samples.is_empty() {
        return Err(Error::TooFewRows { needed: 1, got: 0 });
    }
    if samples.len() != grid.n_samples {
        return Err(Error::InvalidGrid(format!(
            "{} samples for a grid of {} times",
            samples.len(),
            grid.n_samples
        )));
    }
    let rows = samples
        .iter()
        .enumerate()
        .map(|(k, s)| {
            Ok(SeriesRow {
                t: grid.time(k),
                m: expectation_real(s, &ops.m)?,
                k1: expectation_real(s, &ops.k1)?,
                k2: match &ops.k2 {
                    Some(k2) => expectation_real(s, k2)?,
                    None => f64::NAN,
                },
                n_photon: expectation_real(s, &ops.cavity_photons)?,
                norm_drift: (s.norm() - 1.0).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesTable { rows })
}

/// Largest interior deviation between the central-difference derivative of
/// `m` and `g k1`.
pub fn ehrenfest_residual(series: &SeriesTable, params: &ModelParams) -> Result<f64> {
    let rows = &series.rows;
    if rows.len() < 3 {
        return Err(Error::TooFewRows {
            needed: 3,
            got: rows.len(),
        });
    }
    let dt = rows[1].t - rows[0].t;
    if !(dt > 0.0) {
        return Err(Error::InvalidGrid("time column must be increasing".into()));
    }
    for w in rows.windows(2) {
        if ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.max(1.0) {
            return Err(Error::InvalidGrid("time column is not uniformly spaced".into()));
        }
    }
    let g = params.coupling;
    Ok(rows
        .windows(3)
        .map(|w| ((w[2].m - w[0].m) / (2.0 * dt) - g * w[1].k1).abs())
        .fold(0.0, f64::max))
}
