//! Closed rate equations for the collective moments,
//!
//! ```text
//! dm/dt  = g k1
//! dk1/dt = σ 2 N g k2
//! ```
//!
//! with `σ = -1` for [`SignMode::AsPrinted`] and `σ = +1` for
//! [`SignMode::Opposite`]. No equation for `k2` is integrated: it is either
//! frozen at a constant or replayed from a tabulated series, linearly
//! interpolated.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::series::format_value;
use crate::dynamics::TimeGrid;
use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentState {
    pub m: f64,
    pub k1: f64,
    pub k2: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMode {
    /// `dk1/dt = -2 N g k2`
    #[default]
    AsPrinted,
    /// `dk1/dt = +2 N g k2`
    Opposite,
}

impl SignMode {
    pub fn sigma(self) -> f64 {
        match self {
            SignMode::AsPrinted => -1.0,
            SignMode::Opposite => 1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SignMode::AsPrinted => SignMode::Opposite,
            SignMode::Opposite => SignMode::AsPrinted,
        }
    }

    /// The mode whose `σ` equals the sign of `value`.
    pub fn from_sign(value: f64) -> Option<Self> {
        if value > 0.0 {
            Some(SignMode::Opposite)
        } else if value < 0.0 {
            Some(SignMode::AsPrinted)
        } else {
            None
        }
    }
}


/// Tabulated `k2(t)` with strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct K2Series {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl K2Series {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::TooFewRows {
                needed: 2,
                got: times.len().min(values.len()),
            });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("k2 series times must be strictly increasing".into()));
        }
        if values.iter().chain(&times).any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("k2 series must be finite".into()));
        }
        Ok(Self { times, values })
    }

    /// Reads a CSV with a header naming a time column (`time` or `t`) and a
    /// `k2` column; other columns are ignored.
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Input {
            path: path.to_path_buf(),
            reason,
        };
        let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
        let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
        let find = |names: &[&str]| headers.iter().position(|h| names.contains(&h.trim()));
        let t_col = find(&["time", "t"]).ok_or_else(|| bad("missing time column".into()))?;
        let k2_col = find(&["k2"]).ok_or_else(|| bad("missing k2 column".into()))?;
        let mut times = Vec::new();
        let mut values = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            let parse = |col: usize| -> Result<f64> {
                let cell = record.get(col).ok_or_else(|| bad("short row".into()))?;
                cell.trim().parse().map_err(|_| bad(format!("not a number: {cell:?}")))
            };
            times.push(parse(t_col)?);
            values.push(parse(k2_col)?);
        }
        Self::new(times, values).map_err(|e| bad(e.to_string()))
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn knots(&self) -> &[f64] {
        &self.times
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&x| x <= t);
        if k == 0 {
            return self.values[0];
        }
        if k >= self.times.len() {
            return *self.values.last().expect("non-empty");
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        self.values[k - 1] * (1.0 - w) + self.values[k] * w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum K2Closure {
    Constant(f64),
    TimeSeries(K2Series),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureConfig {
    pub k2_model: K2Closure,
    pub sign_mode: SignMode,
}

impl ClosureConfig {
    pub fn constant(k2: f64, sign_mode: SignMode) -> Self {
        Self {
            k2_model: K2Closure::Constant(k2),
            sign_mode,
        }
    }

    fn k2_at(&self, t: f64) -> f64 {
        match &self.k2_model {
            K2Closure::Constant(v) => *v,
            K2Closure::TimeSeries(s) => s.value_at(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentRow {
    pub t: f64,
    pub m: f64,
    pub k1: f64,
    pub k2: f64,
    /// Set when the approximate equations drive `m` below zero.
    pub m_negative: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct MomentSeries {
    pub rows: Vec<MomentRow>,
}

impl MomentSeries {
    pub const HEADER: &'static str = "t,m,k1,k2,m_negative";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::HEADER);
        out.push('\n');
        for r in &self.rows {
            let cells = [r.t, r.m, r.k1, r.k2].map(format_value);
            out.push_str(&cells.join(","));
            out.push_str(if r.m_negative { ",1\n" } else { ",0\n" });
        }
        out
    }

    pub fn m(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.m).collect()
    }
}

/// `dk1/dt` of the closed equations for a given `k2`.
pub fn k1_rate(params: &ModelParams, k2: f64, sign_mode: SignMode) -> f64 {
    sign_mode.sigma() * 2.0 * params.n_particles as f64 * params.coupling * k2
}

/// Integrates the rate equations on `grid` with RK4.
///
/// Substep boundaries include every knot of a tabulated closure, so `k2` is
/// linear on each substep, `m` is a cubic in time there, and RK4 reproduces
/// the solution up to rounding.
pub fn integrate_moment_equations(
    init: &MomentState,
    params: &ModelParams,
    closure: &ClosureConfig,
    grid: &TimeGrid,
) -> Result<MomentSeries> {
    grid.validate()?;
    if let K2Closure::TimeSeries(series) = &closure.k2_model {
        let slack = 1e-9 * grid.t_max;
        if series.start() > slack || series.end() < grid.t_max - slack {
            return Err(Error::ClosureCoverage {
                start: series.start(),
                end: series.end(),
                t_max: grid.t_max,
            });
        }
    }
    let g = params.coupling;
    let c = closure.sign_mode.sigma() * 2.0 * params.n_particles as f64 * g;
    let rhs = |t: f64, k1: f64| (g * k1, c * closure.k2_at(t));

    let (mut m, mut k1) = (init.m, init.k1);
    let k2_0 = match &closure.k2_model {
        K2Closure::Constant(v) => *v,
        K2Closure::TimeSeries(s) => s.value_at(0.0),
    };
    let mut rows = Vec::with_capacity(grid.n_samples);
    rows.push(MomentRow {
        t: 0.0,
        m,
        k1,
        k2: k2_0,
        m_negative: m < 0.0,
    });
    let knots: &[f64] = match &closure.k2_model {
        K2Closure::TimeSeries(s) => s.knots(),
        K2Closure::Constant(_) => &[],
    };
    for k in 1..grid.n_samples {
        let (a, b) = (grid.time(k - 1), grid.time(k));
        let mut cuts = vec![a];
        cuts.extend(knots.iter().copied().filter(|&x| x > a && x < b));
        cuts.push(b);
        for w in cuts.windows(2) {
            let (t, h) = (w[0], w[1] - w[0]);
            let (dm1, dk1) = rhs(t, k1);
            let (dm2, dk2) = rhs(t + 0.5 * h, k1 + 0.5 * h * dk1);
            let (dm3, dk3) = rhs(t + 0.5 * h, k1 + 0.5 * h * dk2);
            let (dm4, dk4) = rhs(t + h, k1 + h * dk3);
            m += h / 6.0 * (dm1 + 2.0 * dm2 + 2.0 * dm3 + dm4);
            k1 += h / 6.0 * (dk1 + 2.0 * dk2 + 2.0 * dk3 + dk4);
        }
        if m < 0.0 {
            log::warn!("moment equations left the physical region: m = {m:e} at t = {b}");
        }
        rows.push(MomentRow {
            t: b,
            m,
            k1,
            k2: closure.k2_at(b),
            m_negative: m < 0.0,
        });
    }
    Ok(MomentSeries { rows })
}

/// Quadratic short-time prediction `m(0) + g k1(0) t + σ N g² k2(0) t²`.
pub fn short_time_expansion(init: &MomentState, params: &ModelParams, sign_mode: SignMode, t: f64) -> f64 {
    let g = params.coupling;
    let n = params.n_particles as f64;
    init.m + g * init.k1 * t + sign_mode.sigma() * n * g * g * init.k2 * t * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModeDims;

    fn params(n: usize, g: f64) -> ModelParams {
        ModelParams::new(n, g, ModeDims::default())
    }

    #[test]
    fn closed_form_reference_point() {
        // m(1) = m(0) - N g^2 k2 t^2 = 0.5 - 4 * 0.01 * 0.25
        let p = params(4, 0.1);
        let init = MomentState { m: 0.5, k1: 0.0, k2: 0.25 };
        let grid = TimeGrid::new(1.0, 11).unwrap();
        let out = integrate_moment_equations(&init, &p, &ClosureConfig::constant(0.25, SignMode::AsPrinted), &grid).unwrap();
        assert!((out.rows.last().unwrap().m - 0.49).abs() < 1e-14);
        assert!((short_time_expansion(&init, &p, SignMode::AsPrinted, 1.0) - 0.49).abs() < 1e-15);
    }

    #[test]
    fn zero_coupling_freezes_everything() {
        let p = params(3, 0.0);
        let init = MomentState { m: 0.2, k1: 0.7, k2: -0.1 };
        let grid = TimeGrid::new(5.0, 6).unwrap();
        let out = integrate_moment_equations(&init, &p, &ClosureConfig::constant(-0.1, SignMode::Opposite), &grid).unwrap();
        assert!(out.rows.iter().all(|r| r.m == 0.2 && r.k1 == 0.7));
    }

    #[test]
    fn decoupled_case_is_linear() {
        let p = params(3, 0.2);
        let init = MomentState { m: 1.0, k1: 0.5, k2: 0.0 };
        let grid = TimeGrid::new(2.0, 9).unwrap();
        let out = integrate_moment_equations(&init, &p, &ClosureConfig::constant(0.0, SignMode::AsPrinted), &grid).unwrap();
        for r in &out.rows {
            assert_eq!(r.k1, 0.5);
            assert!((r.m - (1.0 + 0.2 * 0.5 * r.t)).abs() < 1e-14);
        }
    }

    #[test]
    fn time_series_must_cover_grid() {
        let p = params(2, 0.1);
        let series = K2Series::new(vec![0.0, 1.0], vec![0.1, 0.2]).unwrap();
        let closure = ClosureConfig {
            k2_model: K2Closure::TimeSeries(series),
            sign_mode: SignMode::AsPrinted,
        };
        let init = MomentState { m: 0.0, k1: 0.0, k2: 0.1 };
        assert!(matches!(
            integrate_moment_equations(&init, &p, &closure, &TimeGrid::new(2.0, 3).unwrap()),
            Err(Error::ClosureCoverage { .. })
        ));
        assert!(integrate_moment_equations(&init, &p, &closure, &TimeGrid::new(1.0, 3).unwrap()).is_ok());
    }

    #[test]
    fn linear_k2_series_is_integrated_exactly() {
        // k2 = 0.1 + 0.3 t, sigma = +1, N = 2, g = 0.5:
        //   k1 = 2 (0.1 t + 0.15 t^2),  m = 0.5 * 2 (0.05 t^2 + 0.05 t^3)
        let p = params(2, 0.5);
        let series = K2Series::new(vec![0.0, 0.37, 1.1, 2.0], vec![0.1, 0.211, 0.43, 0.7]).unwrap();
        let closure = ClosureConfig {
            k2_model: K2Closure::TimeSeries(series),
            sign_mode: SignMode::Opposite,
        };
        let init = MomentState { m: 0.0, k1: 0.0, k2: 0.1 };
        let out = integrate_moment_equations(&init, &p, &closure, &TimeGrid::new(2.0, 5).unwrap()).unwrap();
        for r in &out.rows {
            let t = r.t;
            assert!((r.k1 - 2.0 * (0.1 * t + 0.15 * t * t)).abs() < 1e-13);
            assert!((r.m - (0.05 * t * t + 0.05 * t * t * t)).abs() < 1e-13);
            assert!((r.k2 - (0.1 + 0.3 * t)).abs() < 1e-13);
        }
    }

    #[test]
    fn negative_m_is_flagged_not_fatal() {
        let p = params(4, 1.0);
        let init = MomentState { m: 0.01, k1: 0.0, k2: 0.25 };
        let out = integrate_moment_equations(&init, &p, &ClosureConfig::constant(0.25, SignMode::AsPrinted), &TimeGrid::new(1.0, 5).unwrap()).unwrap();
        assert!(!out.rows[0].m_negative);
        assert!(out.rows.last().unwrap().m_negative);
        assert!(out.to_csv().trim_end().ends_with(",1"));
    }

    #[test]
    fn k2_series_csv_reader() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k2.csv");
        std::fs::write(&path, "t,m,k1,k2\n0.0,0,0,0.25\n1.0,0,0,0.5\n").unwrap();
        let s = K2Series::from_csv_path(&path).unwrap();
        assert_eq!(s.value_at(0.5), 0.375);
        std::fs::write(&path, "time,k1\n0.0,1\n").unwrap();
        assert!(matches!(K2Series::from_csv_path(&path), Err(Error::Input { .. })));
    }

    #[test]
    fn sign_helpers() {
        assert_eq!(SignMode::from_sign(2.0), Some(SignMode::Opposite));
        assert_eq!(SignMode::from_sign(-1.0), Some(SignMode::AsPrinted));
        assert_eq!(SignMode::from_sign(0.0), None);
        assert_eq!(SignMode::AsPrinted.flipped(), SignMode::Opposite);
        assert!((k1_rate(&params(3, 0.1), 0.25, SignMode::AsPrinted) + 0.15).abs() < 1e-15);
    }
}
