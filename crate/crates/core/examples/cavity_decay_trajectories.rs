//! Cavity loss as quantum jumps: a Pairing pair with `kappa = g` over
//! `g t_max = 20`. Prints the averaged phonon number and emitted photons and
//! whether the phonons ended hotter than they started.

use std::f64::consts::FRAC_PI_4;

use cavity_collective::dynamics::{evolve_with_decay, DecayParams, TimeGrid, DEFAULT_TOL};
use cavity_collective::{build_state, ModeDims, ModelOperators, ModelParams, StateRecipe};

fn main() -> cavity_collective::Result<()> {
    let g = 0.1;
    let params = ModelParams::new(2, g, ModeDims { a: 2, b: 6, c: 4 });
    let ops = ModelOperators::build(&params)?;
    let psi0 = build_state(&ops.space, &StateRecipe::pairing(FRAC_PI_4))?;
    let grid = TimeGrid::new(20.0 / g, 101)?;
    let n_traj = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(40);
    let decay = DecayParams { kappa: g, n_traj, seed: 2024 };

    let run = evolve_with_decay(&psi0, &ops.hamiltonian, &decay, &grid, DEFAULT_TOL, &params)?;
    for (row, emitted) in run.series.rows.iter().zip(&run.emitted).step_by(10) {
        println!("g t = {:5.1}  m = {:.5}  n_c = {:.5}  emitted = {:.3}", g * row.t, row.m, row.n_photon, emitted);
    }
    let (first, last) = (run.series.rows[0].m, run.series.rows.last().expect("samples").m);
    println!(
        "{n_traj} trajectories, {} RK4 substeps per sample; m(t_max) - m(0) = {:+.4} ({})",
        run.substeps,
        last - first,
        if last > first { "heating" } else { "cooling" }
    );
    Ok(())
}
