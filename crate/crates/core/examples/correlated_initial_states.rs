//! Exchange and Pairing product states: their `k2` has opposite signs and
//! does not depend on the phase or on the number of particles.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use cavity_collective::fock::expectation_real;
use cavity_collective::{build_state, ModeDims, ModelOperators, ModelParams, StateRecipe};

fn main() -> cavity_collective::Result<()> {
    println!("{:>2} {:>8} {:>5} {:>12} {:>12} {:>10}", "N", "theta", "phi", "k2 exchange", "k2 pairing", "c²s²");
    for n in [2, 3] {
        let ops = ModelOperators::build(&ModelParams::new(n, 0.1, ModeDims::default()))?;
        let k2 = ops.k2.as_ref().expect("N >= 2");
        for theta in [FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8] {
            for phi in [0.0, 2.0] {
                let ex = build_state(&ops.space, &StateRecipe::Exchange { theta, phi })?;
                let pa = build_state(&ops.space, &StateRecipe::Pairing { theta, phi })?;
                println!(
                    "{n:>2} {theta:>8.4} {phi:>5.1} {:>12.8} {:>12.8} {:>10.8}",
                    expectation_real(&ex, k2)?,
                    expectation_real(&pa, k2)?,
                    (theta.cos() * theta.sin()).powi(2)
                );
            }
        }
    }
    Ok(())
}
