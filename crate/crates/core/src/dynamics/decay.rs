//! Cavity loss through quantum-jump trajectories.
//!
//! This goes beyond the closed interaction model: a single collapse channel
//! `sqrt(kappa) c` is added. Between jumps the unnormalised state follows
//! `dψ/dt = (-i H - kappa/2 c†c) ψ`. A jump is applied at the end of the
//! first substep after which `||ψ||^2` falls below a uniform threshold drawn
//! from the trajectory's counter-based generator; the state is then replaced
//! by `c ψ / ||c ψ||` and a new threshold is drawn. Every jump is one
//! photon leaving the cavity.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::series::{SeriesRow, SeriesTable};
use super::{select_substeps, Generator, Rk4, TimeGrid};
use crate::error::{Error, Result};
use crate::fock::{expectation_real, norm, Operator, StateVector};
use crate::model::{ModelOperators, ModelParams};
use crate::rng::CounterRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    /// Cavity energy decay rate, same units as the coupling.
    pub kappa: f64,
    pub n_traj: usize,
    pub seed: u64,
}

impl DecayParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::InvalidDecay(format!("kappa must be >= 0, got {}", self.kappa)));
        }
        if self.n_traj == 0 {
            return Err(Error::InvalidDecay("n_traj must be at least 1".into()));
        }
        Ok(())
    }

    /// Key of trajectory `index`: draw `index` of the master stream.
    pub fn trajectory_key(&self, index: usize) -> u64 {
        CounterRng::new(self.seed).at(index as u64)
    }
}

/// One quantum-jump trajectory sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// Observables of the normalised conditional state. `norm_drift` holds
    /// `|1 - ||ψ̃|||` of the unnormalised no-jump record.
    pub series: SeriesTable,
    /// Cumulative number of jumps at each sample.
    pub emitted: Vec<u64>,
    /// `||ψ̃||^2` of the no-jump record at each sample (reset to 1 by jumps).
    pub record_norm: Vec<f64>,
    pub jump_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRun {
    /// Trajectory averages; `norm_drift` is the averaged no-jump norm
    /// deficit, which coincides with the unitary drift when `kappa = 0`.
    pub series: SeriesTable,
    /// Mean cumulative emitted photons at each sample.
    pub emitted: Vec<f64>,
    pub jumps_per_trajectory: Vec<u64>,
    pub substeps: usize,
}

impl DecayRun {
    pub const HEADER: &'static str = "t,m,k1,k2,n_photon,norm_drift,emitted";

    pub fn to_csv(&self) -> String {
        use super::series::format_value;
        let mut out = String::from(Self::HEADER);
        out.push('\n');
        for (r, e) in self.series.rows.iter().zip(&self.emitted) {
            let cells = [r.t, r.m, r.k1, r.k2, r.n_photon, r.norm_drift, *e].map(format_value);
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn row_for(ops: &ModelOperators, t: f64, psi: &[Complex64]) -> Result<SeriesRow> {
    let record = norm(psi);
    let state = StateVector::normalized(ops.space.clone(), psi.to_vec())?;
    Ok(SeriesRow {
        t,
        m: expectation_real(&state, &ops.m)?,
        k1: expectation_real(&state, &ops.k1)?,
        k2: match &ops.k2 {
            Some(k2) => expectation_real(&state, k2)?,
            None => f64::NAN,
        },
        n_photon: expectation_real(&state, &ops.cavity_photons)?,
        norm_drift: (1.0 - record).abs(),
    })
}

/// Runs trajectory `index` with `nsub` RK4 substeps per sample interval.
pub fn simulate_trajectory(
    state: &StateVector,
    ops: &ModelOperators,
    lowering_c: &Operator,
    decay: &DecayParams,
    grid: &TimeGrid,
    nsub: usize,
    index: usize,
) -> Result<TrajectoryRecord> {
    let g = Generator::damped(&ops.hamiltonian, &ops.cavity_photons, decay.kappa);
    let mut rng = CounterRng::new(decay.trajectory_key(index));
    let mut threshold = rng.next_open01();
    let mut rk = Rk4::new(state.amplitudes().len());
    let mut psi = state.amplitudes().to_vec();
    let h = grid.dt() / nsub as f64;

    let mut rows = Vec::with_capacity(grid.n_samples);
    let mut emitted = Vec::with_capacity(grid.n_samples);
    let mut record_norm = Vec::with_capacity(grid.n_samples);
    let mut jump_times = Vec::new();
    rows.push(row_for(ops, 0.0, &psi)?);
    emitted.push(0);
    record_norm.push(norm(&psi).powi(2));

    for k in 1..grid.n_samples {
        let t0 = grid.time(k - 1);
        for s in 0..nsub {
            rk.step(&g, &mut psi, h);
            if decay.kappa > 0.0 && norm(&psi).powi(2) < threshold {
                let jumped = lowering_c.matrix().mul_vec(&psi);
                let jn = norm(&jumped);
                if jn > 0.0 {
                    psi = jumped.into_iter().map(|a| a / jn).collect();
                    jump_times.push(t0 + (s + 1) as f64 * h);
                }
                threshold = rng.next_open01();
            }
        }
        rows.push(row_for(ops, grid.time(k), &psi)?);
        emitted.push(jump_times.len() as u64);
        record_norm.push(norm(&psi).powi(2));
    }
    Ok(TrajectoryRecord {
        series: SeriesTable { rows },
        emitted,
        record_norm,
        jump_times,
    })
}

/// Averages `n_traj` quantum-jump trajectories. Trajectories may run in
/// parallel; the reduction is always in trajectory order, so the output is
/// bitwise independent of scheduling.
pub fn evolve_with_decay(
    state: &StateVector,
    h: &Operator,
    decay: &DecayParams,
    grid: &TimeGrid,
    tol: f64,
    params: &ModelParams,
) -> Result<DecayRun> {
    decay.validate()?;
    grid.validate()?;
    let ops = ModelOperators::build(params)?;
    if **h.space() != **state.space() || *ops.space != **state.space() {
        return Err(Error::SpaceMismatch);
    }
    let residual = h.hermiticity_residual();
    if residual > crate::fock::HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let g = Generator::damped(h, &ops.cavity_photons, decay.kappa);
    let (nsub, _) = select_substeps(&g, state.amplitudes(), grid, tol, decay.kappa == 0.0)?;
    let ops = ModelOperators {
        hamiltonian: h.clone(),
        ..ops.clone()
    };
    let lowering_c = crate::fock::lowering_op(&ops.space, crate::fock::ModeId::Cavity)?;

    let records: Vec<TrajectoryRecord> = (0..decay.n_traj)
        .into_par_iter()
        .map(|j| simulate_trajectory(state, &ops, &lowering_c, decay, grid, nsub, j))
        .collect::<Result<_>>()?;

    let n = decay.n_traj as f64;
    let mut rows = Vec::with_capacity(grid.n_samples);
    let mut emitted = Vec::with_capacity(grid.n_samples);
    for k in 0..grid.n_samples {
        let mut acc = SeriesRow {
            t: grid.time(k),
            m: 0.0,
            k1: 0.0,
            k2: 0.0,
            n_photon: 0.0,
            norm_drift: 0.0,
        };
        let mut e = 0.0;
        for rec in &records {
            let r = &rec.series.rows[k];
            acc.m += r.m;
            acc.k1 += r.k1;
            acc.k2 += r.k2;
            acc.n_photon += r.n_photon;
            acc.norm_drift += r.norm_drift;
            e += rec.emitted[k] as f64;
        }
        acc.m /= n;
        acc.k1 /= n;
        acc.k2 /= n;
        acc.n_photon /= n;
        acc.norm_drift /= n;
        rows.push(acc);
        emitted.push(e / n);
    }
    Ok(DecayRun {
        series: SeriesTable { rows },
        emitted,
        jumps_per_trajectory: records.iter().map(|r| r.jump_times.len() as u64).collect(),
        substeps: nsub,
    })
}
