//! Initial states. The correlated families put every particle into the same
//! two-component superposition of its `(a, b)` modes with the cavity empty:
//!
//! * `Exchange`: `cos θ |n_a=0, n_b=1⟩ + e^{iφ} sin θ |1, 0⟩`, giving `k2 = +cos²θ sin²θ`
//! * `Pairing`:  `cos θ |0, 0⟩ + e^{iφ} sin θ |1, 1⟩`, giving `k2 = -cos²θ sin²θ`

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{HilbertSpace, ModeId, StateVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateRecipe {
    Vacuum,
    /// Occupations listed in canonical mode order.
    FockProduct { occupations: Vec<usize> },
    Exchange {
        theta: f64,
        #[serde(default)]
        phi: f64,
    },
    Pairing {
        theta: f64,
        #[serde(default)]
        phi: f64,
    },
}

impl StateRecipe {
    pub fn exchange(theta: f64) -> Self {
        StateRecipe::Exchange { theta, phi: 0.0 }
    }

    pub fn pairing(theta: f64) -> Self {
        StateRecipe::Pairing { theta, phi: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StateRecipe::Exchange { theta, phi } | StateRecipe::Pairing { theta, phi } => {
                if !(0.0..=FRAC_PI_2).contains(&theta) {
                    return Err(Error::InvalidRecipe(format!("theta {theta} outside [0, pi/2]")));
                }
                if !(0.0..2.0 * PI).contains(&phi) {
                    return Err(Error::InvalidRecipe(format!("phi {phi} outside [0, 2pi)")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `k2` of the recipe, `cos²θ sin²θ` with the family's sign. Zero for
    /// Fock products and the vacuum.
    pub fn expected_k2(&self) -> f64 {
        match *self {
            StateRecipe::Exchange { theta, .. } => (theta.cos() * theta.sin()).powi(2),
            StateRecipe::Pairing { theta, .. } => -(theta.cos() * theta.sin()).powi(2),
            _ => 0.0,
        }
    }
}

/// Per-particle two-component amplitudes over the `(n_a, n_b)` block.
fn particle_amplitudes(recipe: &StateRecipe, da: usize, db: usize) -> Option<Vec<Complex64>> {
    let (theta, phi, first, second) = match *recipe {
        StateRecipe::Exchange { theta, phi } => (theta, phi, (0, 1), (1, 0)),
        StateRecipe::Pairing { theta, phi } => (theta, phi, (0, 0), (1, 1)),
        _ => return None,
    };
    let mut block = vec![Complex64::new(0.0, 0.0); da * db];
    block[first.0 * db + first.1] += Complex64::new(theta.cos(), 0.0);
    block[second.0 * db + second.1] += Complex64::from_polar(theta.sin(), phi);
    Some(block)
}

/// Particle blocks are contiguous in canonical order, so the full state is
/// the Kronecker product of identical blocks with the cavity vacuum.
fn product_of_blocks(block: &[Complex64], n_particles: usize, dc: usize) -> Vec<Complex64> {
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..n_particles {
        amps = amps.iter().flat_map(|&x| block.iter().map(move |&y| x * y)).collect();
    }
    amps.into_iter()
        .flat_map(|x| (0..dc).map(move |k| if k == 0 { x } else { Complex64::new(0.0, 0.0) }))
        .collect()
}

/// Counts particles and reads the uniform `(a, b, c)` dims off a model space.
fn particle_layout(space: &HilbertSpace) -> Result<(usize, usize, usize, usize)> {
    let modes = space.modes();
    let bad = || Error::InvalidRecipe("space is not a particles-plus-cavity layout".into());
    let (cavity, particles) = modes.split_last().ok_or_else(bad)?;
    if cavity.mode != ModeId::Cavity || particles.len() % 2 != 0 || particles.is_empty() {
        return Err(bad());
    }
    let n = particles.len() / 2;
    let (da, db) = (particles[0].dim, particles[1].dim);
    for (i, pair) in particles.chunks(2).enumerate() {
        if pair[0].mode != ModeId::A(i) || pair[1].mode != ModeId::B(i) || pair[0].dim != da || pair[1].dim != db {
            return Err(bad());
        }
    }
    Ok((n, da, db, cavity.dim))
}

pub fn build_state(space: &Arc<HilbertSpace>, recipe: &StateRecipe) -> Result<StateVector> {
    recipe.validate()?;
    match recipe {
        StateRecipe::Vacuum => StateVector::basis(space.clone(), &vec![0; space.modes().len()]),
        StateRecipe::FockProduct { occupations } => StateVector::basis(space.clone(), occupations),
        StateRecipe::Exchange { .. } | StateRecipe::Pairing { .. } => {
            let (n, da, db, dc) = particle_layout(space)?;
            // both families need n_a and n_b up to 1, which dims >= 2 guarantee
            let block = particle_amplitudes(recipe, da, db).expect("correlated recipe");
            StateVector::new(space.clone(), product_of_blocks(&block, n, dc))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{expectation, make_space, ModeSpec};
    use crate::model::{ModeDims, ModelOperators, ModelParams};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn recipe_validation() {
        assert!(StateRecipe::exchange(-0.1).validate().is_err());
        assert!(StateRecipe::pairing(2.0).validate().is_err());
        assert!(StateRecipe::Exchange { theta: 0.3, phi: 2.0 * PI }.validate().is_err());
        assert!(StateRecipe::Exchange { theta: 0.3, phi: 6.0 }.validate().is_ok());
    }

    #[test]
    fn occupation_beyond_truncation() {
        let params = ModelParams::new(1, 0.1, ModeDims::default());
        let space = params.space().unwrap();
        let recipe = StateRecipe::FockProduct {
            occupations: vec![0, 3, 0],
        };
        assert!(matches!(
            build_state(&space, &recipe),
            Err(Error::OccupationOutOfRange { occupation: 3, .. })
        ));
        let short = StateRecipe::FockProduct { occupations: vec![0, 1] };
        assert!(build_state(&space, &short).is_err());
    }

    #[test]
    fn correlated_recipe_needs_model_layout() {
        let space = Arc::new(make_space(&[ModeSpec::new(ModeId::Cavity, 3)]).unwrap());
        assert!(build_state(&space, &StateRecipe::exchange(FRAC_PI_4)).is_err());
    }

    #[test]
    fn exchange_at_zero_angle_is_a_fock_product() {
        let params = ModelParams::new(2, 0.1, ModeDims::default());
        let space = params.space().unwrap();
        let s = build_state(&space, &StateRecipe::exchange(0.0)).unwrap();
        let fock = build_state(
            &space,
            &StateRecipe::FockProduct {
                occupations: vec![0, 1, 0, 1, 0],
            },
        )
        .unwrap();
        assert_eq!(s.amplitudes(), fock.amplitudes());
        let ops = ModelOperators::build(&params).unwrap();
        assert_eq!(expectation(&s, ops.k2.as_ref().unwrap()).unwrap().norm(), 0.0);
        assert_eq!(expectation(&s, &ops.m).unwrap().re, 1.0);
    }

    #[test]
    fn fock_product_mean_phonon_number() {
        let params = ModelParams::new(3, 0.1, ModeDims::default());
        let ops = ModelOperators::build(&params).unwrap();
        let s = build_state(
            &ops.space,
            &StateRecipe::FockProduct {
                occupations: vec![1, 2, 0, 0, 1, 1, 2],
            },
        )
        .unwrap();
        assert_eq!(expectation(&s, &ops.m).unwrap().re, 1.0);
        assert_eq!(expectation(&s, &ops.cavity_photons).unwrap().re, 2.0);
    }
}
