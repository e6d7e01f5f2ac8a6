//! Initial `dk1/dt` from the exact commutator for N = 2..6, fitted to an
//! affine law in N. The slope sign relative to `k2` decides which sign
//! convention of the closed equations the model follows.

use std::f64::consts::FRAC_PI_4;

use cavity_collective::experiments::{sweep_collective_scaling, RunConfig};
use cavity_collective::{ModeDims, ModelParams, StateRecipe};

fn main() -> cavity_collective::Result<()> {
    let ns = [2, 3, 4, 5, 6];
    for recipe in [StateRecipe::pairing(FRAC_PI_4), StateRecipe::exchange(FRAC_PI_4)] {
        let config = RunConfig {
            params: ModelParams::new(2, 0.05, ModeDims { a: 2, b: 2, c: 3 }),
            recipe: recipe.clone(),
            ..RunConfig::default()
        };
        let report = sweep_collective_scaling(&config, &ns)?;
        println!("{recipe:?}");
        for p in &report.points {
            println!("  N = {}  dk1/dt = {:+.10}", p.n, p.rate);
        }
        println!(
            "  slope {:+.6} intercept {:+.6}; predicted {:+.4} (as printed) / {:+.4} (opposite); relative slope error {:.1e}",
            report.fit.slope,
            report.fit.intercept,
            report.predicted_slope_as_printed,
            report.predicted_slope_opposite,
            report.relative_slope_error
        );
        println!("  measured sign {:+}, consistent with {:?}", report.measured_sign, report.consistent_sign_mode);
    }
    Ok(())
}
