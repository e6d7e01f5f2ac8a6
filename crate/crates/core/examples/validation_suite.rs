//! Runs the built-in checks on the default model, then again with a
//! deliberately wrong Hamiltonian to show which checks catch it.

use cavity_collective::experiments::{validate_suite, validate_suite_with_hamiltonian, RunConfig, ValidationReport};
use cavity_collective::ModelOperators;

fn show(title: &str, report: &ValidationReport) {
    println!("{title}: {}", if report.passed { "all checks pass" } else { "failures" });
    for c in &report.checks {
        println!("  {} {:<34} {:.2e}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.measured);
    }
}

fn main() -> cavity_collective::Result<()> {
    let config = RunConfig::default();
    show("model Hamiltonian", &validate_suite(&config)?);

    let ops = ModelOperators::build(&config.params)?;
    show("Hamiltonian with coupling off by 20%", &validate_suite_with_hamiltonian(&config, ops.hamiltonian.scaled(1.2))?);
    Ok(())
}
