//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test --test acceptance`.

mod common;

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cavity_collective::dynamics::{
    ehrenfest_residual, evolve, evolve_with_decay, exact_rate, observable_series, DecayParams, TimeGrid,
};
use cavity_collective::experiments::{compare_runs, sweep_collective_scaling, ClosureSection, K2Source, RunConfig};
use cavity_collective::fock::{expectation, expectation_real, lowering_op, StateVector};
use cavity_collective::moments::{integrate_moment_equations, ClosureConfig, SignMode};
use cavity_collective::rng::CounterRng;
use cavity_collective::{build_state, ModeDims, ModelOperators, ModelParams, StateRecipe};
use num_complex::Complex64;

struct Outcome {
    passed: bool,
    detail: String,
}

type Check = fn() -> Outcome;

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn c1_operator_algebra() -> Outcome {
    let mut worst_diag: f64 = 0.0;
    let mut worst_cross: f64 = 0.0;
    for d in [2, 3, 4] {
        let params = ModelParams::new(2, 0.1, ModeDims { a: d, b: d, c: d });
        let space = params.space().unwrap();
        let lowers: Vec<_> = space.modes().iter().map(|s| lowering_op(&space, s.mode).unwrap()).collect();
        for (pos, x) in lowers.iter().enumerate() {
            let comm = x.commutator(&x.adjoint()).unwrap();
            for (r, col, v) in comm.matrix().iter() {
                let expected = if r != col {
                    0.0
                } else if space.occupation(r, pos) == d - 1 {
                    1.0 - d as f64
                } else {
                    1.0
                };
                worst_diag = worst_diag.max((v - Complex64::new(expected, 0.0)).norm());
            }
            for r in 0..space.total_dim() {
                if comm.matrix().get(r, r) == Complex64::new(0.0, 0.0) {
                    worst_diag = f64::INFINITY;
                }
            }
            for y in &lowers[pos + 1..] {
                worst_cross = worst_cross.max(x.commutator(y).unwrap().matrix().max_abs());
                worst_cross = worst_cross.max(x.commutator(&y.adjoint()).unwrap().matrix().max_abs());
            }
        }
    }
    outcome(
        worst_diag <= 1e-14 && worst_cross == 0.0,
        format!("max |[x,x†] - truncated 1| = {worst_diag:.1e}, max cross-mode = {worst_cross:.1e}"),
    )
}

fn c2_hermiticity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut k2_count = 0;
    for n in 1..=6 {
        let ops = ModelOperators::build(&ModelParams::new(n, 0.1, ModeDims::default())).unwrap();
        for op in [&ops.hamiltonian, &ops.m, &ops.k1] {
            worst = worst.max(op.hermiticity_residual());
        }
        if let Some(k2) = &ops.k2 {
            worst = worst.max(k2.hermiticity_residual());
            k2_count += 1;
        }
    }
    outcome(
        worst <= 1e-12 && k2_count == 5,
        format!("max ‖A - A†‖ over H, M, K1, K2 for N = 1..6 = {worst:.1e}"),
    )
}

fn c3_ehrenfest_identity() -> Outcome {
    let params = ModelParams::new(2, 0.1, ModeDims::default());
    let ops = ModelOperators::build(&params).unwrap();
    let mut worst: f64 = 0.0;
    for j in 0..100u64 {
        let mut rng = CounterRng::new(CounterRng::new(42).at(j));
        let amps = (0..ops.space.total_dim())
            .map(|_| Complex64::new(rng.next_open01() - 0.5, rng.next_open01() - 0.5))
            .collect();
        let psi = StateVector::normalized(ops.space.clone(), amps).unwrap();
        let rate = exact_rate(&psi, &ops.m, &ops.hamiltonian).unwrap();
        worst = worst.max((rate - params.coupling * expectation_real(&psi, &ops.k1).unwrap()).abs());
    }
    outcome(worst <= 1e-10, format!("max |<-i[M,H]> - g<K1>| over 100 random states = {worst:.1e}"))
}

fn c4_propagation_quality() -> Outcome {
    let params = ModelParams::new(3, 0.1, ModeDims { a: 2, b: 3, c: 3 });
    let ops = ModelOperators::build(&params).unwrap();
    let psi0 = build_state(&ops.space, &StateRecipe::exchange(FRAC_PI_4)).unwrap();
    let mut drift: f64 = 0.0;
    let mut residuals = Vec::new();
    for n_samples in [201, 401] {
        let grid = TimeGrid::new(20.0, n_samples).unwrap();
        let samples = evolve(&psi0, &ops.hamiltonian, &grid, 1e-10).unwrap();
        let series = observable_series(&grid, &samples, &params).unwrap();
        drift = drift.max(series.max_norm_drift());
        residuals.push(ehrenfest_residual(&series, &params).unwrap());
    }
    let ratio = residuals[0] / residuals[1];
    outcome(
        drift <= 1e-8 && (3.5..=4.5).contains(&ratio),
        format!(
            "norm drift {drift:.1e}; residual {:.3e} -> {:.3e} when dt halves, ratio {ratio:.3}",
            residuals[0], residuals[1]
        ),
    )
}

fn c5_correlation_references() -> Outcome {
    let mut worst_ref: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for n in [2, 3] {
        let dims = ModeDims { a: 2, b: 2, c: 2 };
        let ops = ModelOperators::build(&ModelParams::new(n, 0.1, dims)).unwrap();
        let k2 = ops.k2.as_ref().unwrap();
        let dense = common::Dense::new(n, dims.a, dims.b, dims.c);
        let dk2 = dense.k2();
        for theta in [FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8] {
            let cs2 = (theta.cos() * theta.sin()).powi(2);
            for phi in [0.0, 1.0, 2.5, 4.0] {
                for (recipe, sign, oracle_state) in [
                    (StateRecipe::Exchange { theta, phi }, 1.0, dense.exchange(theta, phi)),
                    (StateRecipe::Pairing { theta, phi }, -1.0, dense.pairing(theta, phi)),
                ] {
                    let value = expectation(&build_state(&ops.space, &recipe).unwrap(), k2).unwrap();
                    let oracle = common::expect(&dk2, &oracle_state);
                    worst_ref = worst_ref.max((value - Complex64::new(sign * cs2, 0.0)).norm());
                    worst_oracle = worst_oracle.max((value - oracle).norm());
                }
            }
        }
    }
    outcome(
        worst_ref <= 1e-10 && worst_oracle <= 1e-10,
        format!("max |<K2> - ±c²s²| = {worst_ref:.1e}, max |library - dense oracle| = {worst_oracle:.1e}"),
    )
}

fn sweep_config(recipe: StateRecipe) -> RunConfig {
    RunConfig {
        params: ModelParams::new(2, 0.05, ModeDims { a: 2, b: 2, c: 3 }),
        recipe,
        ..RunConfig::default()
    }
}

fn c6_collective_scaling() -> Outcome {
    let ns = [2, 3, 4, 5, 6];
    let pairing = sweep_collective_scaling(&sweep_config(StateRecipe::pairing(FRAC_PI_4)), &ns).unwrap();
    let exchange = sweep_collective_scaling(&sweep_config(StateRecipe::exchange(FRAC_PI_4)), &ns).unwrap();
    let target = 2.0 * 0.05 * pairing.k2.abs();
    let slope_ok = (pairing.fit.slope.abs() - target).abs() <= 0.1 * target;
    let residual_ok = pairing.fit.max_residual <= 0.01 * pairing.fit.slope.abs() * 6.0;
    let sign_ok = pairing.measured_sign != 0.0 && pairing.measured_sign == exchange.measured_sign;
    outcome(
        slope_ok && residual_ok && sign_ok,
        format!(
            "Pairing slope {:.6e} (target |slope| {target:.4}), intercept {:.3e}, max residual {:.1e}; \
             measured sign Pairing {:+} Exchange {:+} -> {:?}",
            pairing.fit.slope,
            pairing.fit.intercept,
            pairing.fit.max_residual,
            pairing.measured_sign,
            exchange.measured_sign,
            pairing.consistent_sign_mode
        ),
    )
}

fn c7_moment_fidelity() -> Outcome {
    let config = RunConfig {
        closure: Some(ClosureSection {
            k2: K2Source::Initial,
            sign_mode: SignMode::AsPrinted,
        }),
        ..RunConfig::default()
    };
    let (exact, report, _) = compare_runs(&config).unwrap();
    let Some(winner) = report.winner else {
        return outcome(false, "no winning sign mode".into());
    };
    let init = exact.initial_moments().unwrap();
    let rates = integrate_moment_equations(
        &init,
        &config.params,
        &ClosureConfig::constant(init.k2, winner),
        &config.grid,
    )
    .unwrap();
    let exact_m = exact.series.column(|r| r.m);
    let window_error = |t_end: f64| {
        rates
            .rows
            .iter()
            .zip(&exact_m)
            .filter(|(r, _)| r.t <= t_end + 1e-12)
            .map(|(r, m)| (r.m - m).abs())
            .fold(0.0, f64::max)
    };
    let g = config.params.coupling;
    let full = window_error(0.2 / g);
    let half = window_error(0.1 / g);
    let ratio = full / half;
    outcome(
        (6.0..=10.0).contains(&ratio),
        format!("winner {winner:?}; error over g t <= 0.2: {full:.3e}, over g t <= 0.1: {half:.3e}, ratio {ratio:.2}"),
    )
}

fn c8_decay_sanity() -> Outcome {
    let params = ModelParams::new(2, 0.1, ModeDims::default());
    let ops = ModelOperators::build(&params).unwrap();
    let psi = build_state(&ops.space, &StateRecipe::pairing(FRAC_PI_4)).unwrap();
    let grid = TimeGrid::new(2.0, 201).unwrap();
    let unitary = observable_series(&grid, &evolve(&psi, &ops.hamiltonian, &grid, 1e-10).unwrap(), &params).unwrap();
    let zero = evolve_with_decay(&psi, &ops.hamiltonian, &DecayParams { kappa: 0.0, n_traj: 4, seed: 1 }, &grid, 1e-10, &params)
        .unwrap();
    let zero_diff = zero.series.max_abs_difference(&unitary).unwrap_or(f64::INFINITY);
    let zero_emitted = zero.emitted.iter().fold(0.0f64, |a, e| a.max(e.abs()));

    let long = TimeGrid::new(20.0, 201).unwrap();
    let decay = DecayParams { kappa: 0.5, n_traj: 16, seed: 2024 };
    let a = evolve_with_decay(&psi, &ops.hamiltonian, &decay, &long, 1e-9, &params).unwrap();
    let b = evolve_with_decay(&psi, &ops.hamiltonian, &decay, &long, 1e-9, &params).unwrap();
    let reproducible = a.to_csv() == b.to_csv();
    let nonnegative = a.emitted.iter().all(|&e| e >= 0.0);
    let jumps: u64 = a.jumps_per_trajectory.iter().sum();
    outcome(
        zero_diff <= 1e-9 && zero_emitted == 0.0 && reproducible && nonnegative,
        format!(
            "kappa = 0 max column difference {zero_diff:.1e}; kappa > 0 byte-identical: {reproducible}, \
             emitted >= 0: {nonnegative} ({jumps} jumps over {} trajectories)",
            decay.n_traj
        ),
    )
}

fn c9_end_to_end_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_cavity-collective");
    let tmp = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for k in 0..2 {
        let out = tmp.path().join(format!("run{k}"));
        let status = Command::new(bin)
            .args(["--quiet", "--seed", "11", "--out", out.to_str().unwrap(), "run-exact"])
            .status()
            .unwrap();
        if !status.success() {
            return outcome(false, format!("run-exact exited with {status}"));
        }
        bodies.push(std::fs::read(out.join("series.csv")).unwrap());
    }
    outcome(bodies[0] == bodies[1], format!("two runs, {} bytes each, identical: {}", bodies[0].len(), bodies[0] == bodies[1]))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, Check); 9] = [
        ("1 operator algebra", Duration::from_secs(1), c1_operator_algebra),
        ("2 hermiticity", Duration::from_secs(5), c2_hermiticity),
        ("3 exact Ehrenfest identity", Duration::from_secs(10), c3_ehrenfest_identity),
        ("4 propagation quality", Duration::from_secs(30), c4_propagation_quality),
        ("5 correlation reference values", Duration::from_secs(10), c5_correlation_references),
        ("6 collective N-scaling", Duration::from_secs(60), c6_collective_scaling),
        ("7 moment-equation fidelity", Duration::from_secs(60), c7_moment_fidelity),
        ("8 decay extension sanity", Duration::from_secs(60), c8_decay_sanity),
        ("9 end-to-end determinism", Duration::from_secs(30), c9_end_to_end_determinism),
    ];
    let mut failures = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let passed = result.passed && elapsed <= budget;
        if !passed {
            failures += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.2} s, budget {} s]",
            if passed { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
