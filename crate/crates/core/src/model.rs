//! The three-mode interaction Hamiltonian and the collective observables.
//!
//! With `ħ = 1` the Hamiltonian is
//!
//! ```text
//! H = Σ_i g (b_i + b_i†)(a_i c† + a_i† c)
//! ```
//!
//! where `g` is the three-body coupling. Times are measured in units of
//! `1/g` when `g = 1`; otherwise they are plain numbers in the same units as
//! `1/g`. The observables are normalised per particle (`M`, `K1`) and per
//! ordered pair (`K2`) so their values stay comparable across `N`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{make_space, HilbertSpace, LocalOp, ModeId, ModeSpec, Operator, OperatorRole, ProductTerm};

/// Truncation dimensions applied to every particle's `a` and `b` modes and
/// to the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeDims {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Default for ModeDims {
    fn default() -> Self {
        Self { a: 2, b: 3, c: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub n_particles: usize,
    /// Three-body coupling `ηg`.
    pub coupling: f64,
    #[serde(default)]
    pub dims: ModeDims,
}

impl ModelParams {
    pub fn new(n_particles: usize, coupling: f64, dims: ModeDims) -> Self {
        Self {
            n_particles,
            coupling,
            dims,
        }
    }

    /// Checks `N >= 1`, a finite coupling and dims `>= 2`.
    ///
    /// A vanishing coupling is accepted so that the decoupled limit can be
    /// run; negative couplings are rejected.
    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::InvalidParams("n_particles must be at least 1".into()));
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::InvalidParams(format!("coupling must be >= 0, got {}", self.coupling)));
        }
        for (name, d) in [("a", self.dims.a), ("b", self.dims.b), ("c", self.dims.c)] {
            if d < 2 {
                return Err(Error::InvalidParams(format!("{name}-mode dimension must be >= 2, got {d}")));
            }
        }
        Ok(())
    }

    pub fn mode_specs(&self) -> Vec<ModeSpec> {
        let mut specs = Vec::with_capacity(2 * self.n_particles + 1);
        for i in 0..self.n_particles {
            specs.push(ModeSpec::new(ModeId::A(i), self.dims.a));
            specs.push(ModeSpec::new(ModeId::B(i), self.dims.b));
        }
        specs.push(ModeSpec::new(ModeId::Cavity, self.dims.c));
        specs
    }

    pub fn space(&self) -> Result<Arc<HilbertSpace>> {
        self.validate()?;
        Ok(Arc::new(make_space(&self.mode_specs())?))
    }

    /// Errors unless `space` holds exactly the modes these parameters imply.
    pub fn check_space(&self, space: &HilbertSpace) -> Result<()> {
        self.validate()?;
        if space.modes() != self.mode_specs().as_slice() {
            return Err(Error::ParamsMismatch(format!(
                "expected {} particles with dims (a:{}, b:{}) and cavity dim {}",
                self.n_particles, self.dims.a, self.dims.b, self.dims.c
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObservableKind {
    /// Mean phonon number per particle.
    M,
    K1,
    /// Pair correlation; requires `N >= 2`.
    K2,
    CavityPhotons,
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `(a_i c† + a_i† c)` expanded into its two product pieces, each with the
/// given left factor on `b_i`.
fn vertex_terms(params: &ModelParams, i: usize, coeff: Complex64, b_factor: &LocalOp) -> [ProductTerm; 2] {
    let d = params.dims;
    [
        ProductTerm::new(
            coeff,
            vec![
                (ModeId::A(i), LocalOp::lowering(d.a)),
                (ModeId::B(i), b_factor.clone()),
                (ModeId::Cavity, LocalOp::raising(d.c)),
            ],
        ),
        ProductTerm::new(
            coeff,
            vec![
                (ModeId::A(i), LocalOp::raising(d.a)),
                (ModeId::B(i), b_factor.clone()),
                (ModeId::Cavity, LocalOp::lowering(d.c)),
            ],
        ),
    ]
}

pub fn build_interaction_hamiltonian(params: &ModelParams, space: &Arc<HilbertSpace>) -> Result<Operator> {
    params.check_space(space)?;
    let db = params.dims.b;
    // b + b†
    let position = LocalOp::lowering(db).add(&LocalOp::raising(db));
    let terms: Vec<ProductTerm> = (0..params.n_particles)
        .flat_map(|i| vertex_terms(params, i, real(params.coupling), &position))
        .collect();
    Operator::from_terms(space.clone(), &terms, OperatorRole::Hamiltonian, true)
}

pub fn build_observable(params: &ModelParams, space: &Arc<HilbertSpace>, kind: ObservableKind) -> Result<Operator> {
    params.check_space(space)?;
    let n = params.n_particles;
    let d = params.dims;
    let per_particle = real(1.0 / n as f64);
    match kind {
        ObservableKind::M => {
            let terms: Vec<ProductTerm> = (0..n)
                .map(|i| ProductTerm::new(per_particle, vec![(ModeId::B(i), LocalOp::number(d.b))]))
                .collect();
            Operator::from_terms(space.clone(), &terms, OperatorRole::MeanPhononNumber, true)
        }
        ObservableKind::K1 => {
            // i (b - b†)
            let momentum = LocalOp::lowering(d.b)
                .scale(Complex64::i())
                .add(&LocalOp::raising(d.b).scale(-Complex64::i()));
            let terms: Vec<ProductTerm> = (0..n)
                .flat_map(|i| vertex_terms(params, i, per_particle, &momentum))
                .collect();
            Operator::from_terms(space.clone(), &terms, OperatorRole::K1, true)
        }
        ObservableKind::K2 => {
            if n < 2 {
                return Err(Error::UndefinedK2);
            }
            let pair = real(1.0 / (n * (n - 1)) as f64);
            let mut terms = Vec::with_capacity(2 * n * (n - 1));
            for i in 0..n {
                for j in (0..n).filter(|&j| j != i) {
                    // a_i b_i† a_j† b_j
                    terms.push(ProductTerm::new(
                        pair,
                        vec![
                            (ModeId::A(i), LocalOp::lowering(d.a)),
                            (ModeId::B(i), LocalOp::raising(d.b)),
                            (ModeId::A(j), LocalOp::raising(d.a)),
                            (ModeId::B(j), LocalOp::lowering(d.b)),
                        ],
                    ));
                    // - a_i b_i a_j† b_j†
                    terms.push(ProductTerm::new(
                        -pair,
                        vec![
                            (ModeId::A(i), LocalOp::lowering(d.a)),
                            (ModeId::B(i), LocalOp::lowering(d.b)),
                            (ModeId::A(j), LocalOp::raising(d.a)),
                            (ModeId::B(j), LocalOp::raising(d.b)),
                        ],
                    ));
                }
            }
            Operator::from_terms(space.clone(), &terms, OperatorRole::K2, true)
        }
        ObservableKind::CavityPhotons => {
            let term = ProductTerm::new(real(1.0), vec![(ModeId::Cavity, LocalOp::number(d.c))]);
            Operator::from_terms(space.clone(), &[term], OperatorRole::CavityPhotons, true)
        }
    }
}

/// Every operator the dynamics and diagnostics need for one parameter set.
/// `k2` is `None` for a single particle.
#[derive(Debug, Clone)]
pub struct ModelOperators {
    pub space: Arc<HilbertSpace>,
    pub hamiltonian: Operator,
    pub m: Operator,
    pub k1: Operator,
    pub k2: Option<Operator>,
    pub cavity_photons: Operator,
}

impl ModelOperators {
    pub fn build(params: &ModelParams) -> Result<Self> {
        let space = params.space()?;
        let k2 = if params.n_particles >= 2 {
            Some(build_observable(params, &space, ObservableKind::K2)?)
        } else {
            None
        };
        Ok(Self {
            hamiltonian: build_interaction_hamiltonian(params, &space)?,
            m: build_observable(params, &space, ObservableKind::M)?,
            k1: build_observable(params, &space, ObservableKind::K1)?,
            k2,
            cavity_photons: build_observable(params, &space, ObservableKind::CavityPhotons)?,
            space,
        })
    }
}
