//! Ladder operators on a truncated multi-mode Fock space.
//!
//! Builds a one-particle space (a0, b0, c), checks the truncated canonical
//! commutator mode by mode and round-trips an operator through JSON.

use cavity_collective::fock::{lowering_op, make_space, number_op, ModeSpec, Operator, StateVector};
use cavity_collective::ModeId;
use std::sync::Arc;

fn main() -> cavity_collective::Result<()> {
    let space = Arc::new(make_space(&[
        ModeSpec::new(ModeId::Cavity, 3),
        ModeSpec::new(ModeId::A(0), 2),
        ModeSpec::new(ModeId::B(0), 4),
    ])?);
    let order: Vec<String> = space.modes().iter().map(|s| format!("{}:{}", s.mode, s.dim)).collect();
    println!("canonical order {} -> {} basis states", order.join(" "), space.total_dim());

    for spec in space.modes() {
        let x = lowering_op(&space, spec.mode)?;
        let comm = x.commutator(&x.adjoint())?;
        let top = space.basis_index(&top_occupations(spec.mode, spec.dim))?;
        println!(
            "[{m}, {m}†]: <0|.|0> = {:+.1}, top level = {:+.1} (1 - d = {})",
            comm.matrix().get(0, 0).re,
            comm.matrix().get(top, top).re,
            1 - spec.dim as i64,
            m = spec.mode
        );
    }

    let b = lowering_op(&space, ModeId::B(0))?;
    let c = lowering_op(&space, ModeId::Cavity)?;
    println!("[b0, c†] max entry = {:e}", b.commutator(&c.adjoint())?.matrix().max_abs());

    let n_b = number_op(&space, ModeId::B(0))?;
    let state = StateVector::basis(space.clone(), &[1, 3, 2])?;
    let value = cavity_collective::fock::expectation_real(&state, &n_b)?;
    println!("<a0=1, b0=3, c=2| n_b |...> = {value}");

    let json = c.to_json();
    let back = Operator::from_json(&json)?;
    println!("JSON round trip preserves c: {}", back.matrix() == c.matrix());
    Ok(())
}

fn top_occupations(mode: ModeId, dim: usize) -> Vec<usize> {
    [ModeId::A(0), ModeId::B(0), ModeId::Cavity]
        .iter()
        .map(|&m| if m == mode { dim - 1 } else { 0 })
        .collect()
}
