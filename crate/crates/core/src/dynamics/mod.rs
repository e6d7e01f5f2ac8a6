//! Exact state-vector dynamics under the interaction Hamiltonian.
//!
//! Propagation uses classical fourth-order Runge-Kutta with a fixed number
//! of substeps per sample interval. The substep count starts from the
//! operator norm and is doubled until a step-doubling comparison meets the
//! requested tolerance and the norm drift stays below `1e-8`. States are
//! never renormalised: the drift is kept as the accuracy witness.

mod decay;
pub(crate) mod series;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{inner, norm, Operator, StateVector, HERMITIAN_TOL, EXPECTATION_IMAG_TOL};
use crate::sparse::CsrMatrix;

pub use decay::{evolve_with_decay, simulate_trajectory, DecayParams, DecayRun, TrajectoryRecord};
pub use series::{ehrenfest_residual, format_value, observable_series, observable_series_with, SeriesRow, SeriesTable};

/// Norm drift allowed for unitary propagation.
pub const NORM_DRIFT_TOL: f64 = 1e-8;
/// Default step-doubling tolerance on the state vector.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Substeps are never shorter than this fraction of a sample interval.
const MIN_STEP_FRACTION: f64 = 1.0 / (1u64 << 24) as f64;
/// Initial substep length in units of `1 / ||H||_inf`.
const INITIAL_STEP_SCALE: f64 = 0.5;

/// Uniform sample times `t_k = k t_max / (n_samples - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_samples: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_samples: usize) -> Result<Self> {
        let grid = Self { t_max, n_samples };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidGrid(format!("t_max must be > 0, got {}", self.t_max)));
        }
        if self.n_samples < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {}", self.n_samples)));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_max / (self.n_samples - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.n_samples {
            self.t_max
        } else {
            k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_samples).map(|k| self.time(k)).collect()
    }
}

/// Right-hand side `dψ/dt = G ψ` as a single sparse generator matrix.
pub(crate) struct Generator {
    matrix: CsrMatrix,
}

impl Generator {
    /// `G = -i H`
    pub(crate) fn schrodinger(h: &Operator) -> Self {
        Self {
            matrix: h.matrix().scale(Complex64::new(0.0, -1.0)),
        }
    }

    /// `G = -i H - (kappa/2) c†c`
    pub(crate) fn damped(h: &Operator, loss: &Operator, kappa: f64) -> Self {
        if kappa == 0.0 {
            return Self::schrodinger(h);
        }
        Self {
            matrix: h
                .matrix()
                .axpby(Complex64::new(0.0, -1.0), loss.matrix(), Complex64::new(-0.5 * kappa, 0.0)),
        }
    }

    fn scale_bound(&self) -> f64 {
        self.matrix.inf_norm()
    }
}

pub(crate) struct Rk4 {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4 {
    pub(crate) fn new(dim: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    pub(crate) fn step(&mut self, g: &Generator, psi: &mut [Complex64], h: f64) {
        let m = &g.matrix;
        m.mul_vec_into(psi, &mut self.k1);
        for ((t, p), k) in self.tmp.iter_mut().zip(psi.iter()).zip(&self.k1) {
            *t = p + k * (0.5 * h);
        }
        m.mul_vec_into(&self.tmp, &mut self.k2);
        for ((t, p), k) in self.tmp.iter_mut().zip(psi.iter()).zip(&self.k2) {
            *t = p + k * (0.5 * h);
        }
        m.mul_vec_into(&self.tmp, &mut self.k3);
        for ((t, p), k) in self.tmp.iter_mut().zip(psi.iter()).zip(&self.k3) {
            *t = p + k * h;
        }
        m.mul_vec_into(&self.tmp, &mut self.k4);
        let w = h / 6.0;
        for (i, p) in psi.iter_mut().enumerate() {
            *p += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * w;
        }
    }
}

/// Amplitudes at every grid time using `nsub` substeps per interval.
fn propagate_grid(g: &Generator, psi0: &[Complex64], grid: &TimeGrid, nsub: usize) -> Vec<Vec<Complex64>> {
    let h = grid.dt() / nsub as f64;
    let mut rk = Rk4::new(psi0.len());
    let mut psi = psi0.to_vec();
    let mut out = Vec::with_capacity(grid.n_samples);
    out.push(psi.clone());
    for _ in 1..grid.n_samples {
        for _ in 0..nsub {
            rk.step(g, &mut psi, h);
        }
        out.push(psi.clone());
    }
    out
}

fn max_sample_distance(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

pub(crate) fn max_norm_drift(samples: &[Vec<Complex64>], reference: f64) -> f64 {
    samples.iter().map(|s| (norm(s) - reference).abs()).fold(0.0, f64::max)
}

/// Finds a substep count meeting `tol` (and the norm-drift contract when
/// `unitary`) and returns it with the accepted samples.
pub(crate) fn select_substeps(
    g: &Generator,
    psi0: &[Complex64],
    grid: &TimeGrid,
    tol: f64,
    unitary: bool,
) -> Result<(usize, Vec<Vec<Complex64>>)> {
    let dt = grid.dt();
    let mut nsub = ((dt * g.scale_bound()) / INITIAL_STEP_SCALE).ceil().max(1.0) as usize;
    let mut coarse = propagate_grid(g, psi0, grid, nsub);
    let reference = norm(psi0);
    loop {
        let fine_n = nsub * 2;
        if (fine_n as f64) * MIN_STEP_FRACTION > 1.0 {
            return Err(Error::StepFloor {
                tol,
                min_step: dt * MIN_STEP_FRACTION,
            });
        }
        let fine = propagate_grid(g, psi0, grid, fine_n);
        let err = max_sample_distance(&coarse, &fine);
        let drift_ok = !unitary || max_norm_drift(&fine, reference) <= NORM_DRIFT_TOL;
        if err <= tol && drift_ok {
            log::debug!("propagation accepted with {fine_n} substeps per sample (error {err:e})");
            return Ok((fine_n, fine));
        }
        nsub = fine_n;
        coarse = fine;
    }
}

fn require_hermitian(h: &Operator) -> Result<()> {
    let residual = h.hermiticity_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// Solves `i dψ/dt = H ψ` and returns `ψ(t_k)` at every grid time.
pub fn evolve(state: &StateVector, h: &Operator, grid: &TimeGrid, tol: f64) -> Result<Vec<StateVector>> {
    grid.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidGrid(format!("tolerance must be > 0, got {tol}")));
    }
    if **h.space() != **state.space() {
        return Err(Error::SpaceMismatch);
    }
    require_hermitian(h)?;
    let g = Generator::schrodinger(h);
    let (_, samples) = select_substeps(&g, state.amplitudes(), grid, tol, true)?;
    Ok(samples
        .into_iter()
        .map(|a| StateVector::from_raw(state.space().clone(), a))
        .collect())
}

/// `⟨-i [A, H]⟩` on `state`, computed from the two products `A(Hψ)` and
/// `H(Aψ)` without any time stepping.
pub fn exact_rate(state: &StateVector, observable: &Operator, h: &Operator) -> Result<f64> {
    let hp = h.apply(state)?;
    let ap = observable.apply(state)?;
    let ahp = observable.matrix().mul_vec(&hp);
    let hap = h.matrix().mul_vec(&ap);
    let comm: Vec<Complex64> = ahp.iter().zip(&hap).map(|(x, y)| x - y).collect();
    let value = Complex64::new(0.0, -1.0) * inner(state.amplitudes(), &comm);
    if value.im.abs() > EXPECTATION_IMAG_TOL {
        return Err(Error::ImaginaryExpectation { imag: value.im });
    }
    Ok(value.re)
}
