use cavity_collective::fock::{expectation_real, HERMITIAN_TOL};
use cavity_collective::{build_state, ModeDims, ModelOperators, ModelParams, StateRecipe};

// Assembles H, M, K1, K2 and the cavity photon number for a few particle
// numbers and prints sizes, sparsity and Hermiticity residuals.
fn main() -> cavity_collective::Result<()> {
    for n in 1..=4 {
        let params = ModelParams::new(n, 0.1, ModeDims::default());
        let ops = ModelOperators::build(&params)?;
        let mut line = format!("N = {n}: dim {:>5}, nnz(H) {:>6}", ops.space.total_dim(), ops.hamiltonian.matrix().nnz());
        let mut worst = [&ops.hamiltonian, &ops.m, &ops.k1, &ops.cavity_photons]
            .iter()
            .map(|o| o.hermiticity_residual())
            .fold(0.0, f64::max);
        if let Some(k2) = &ops.k2 {
            worst = worst.max(k2.hermiticity_residual());
            line.push_str(&format!(", nnz(K2) {:>6}", k2.matrix().nnz()));
        }
        println!("{line}, max ‖A - A†‖ = {worst:e} (tolerance {HERMITIAN_TOL:e})");
    }

    let params = ModelParams::new(3, 0.1, ModeDims::default());
    let ops = ModelOperators::build(&params)?;
    let psi = build_state(&ops.space, &StateRecipe::pairing(0.5))?;
    println!(
        "Pairing θ = 0.5 at N = 3: <H> = {:.3e}, M = {:.6}, K1 = {:.3e}, K2 = {:.6}",
        expectation_real(&psi, &ops.hamiltonian)?,
        expectation_real(&psi, &ops.m)?,
        expectation_real(&psi, &ops.k1)?,
        expectation_real(&psi, ops.k2.as_ref().expect("N >= 2"))?
    );
    Ok(())
}
