use std::path::Path;
use std::process::Command;

use cavity_collective::experiments::{
    compare_exact_vs_moments, run_sweep, validate_suite_with_hamiltonian, K2Source, RunConfig,
};
use cavity_collective::moments::SignMode;
use cavity_collective::ModelOperators;

const BIN: &str = env!("CARGO_BIN_EXE_cavity-collective");

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = r#"
seed = 3
[params]
n_particles = 2
coupling = 0.1
[recipe]
kind = "exchange"
theta = 0.7853981633974483
[grid]
t_max = 1.0
n_samples = 51
"#;

#[test]
fn run_exact_is_byte_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SMALL);
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = tmp.path().join(format!("run{k}"));
        let status = cli(&["--quiet", "--config", &config, "--out", out.to_str().unwrap(), "run-exact"]);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        outputs.push(std::fs::read(out.join("series.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.pop().unwrap()).unwrap();
    assert!(text.starts_with("t,m,k1,k2,n_photon,norm_drift\n"));
    assert_eq!(text.lines().count(), 52);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("run1/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "run-exact");
    assert_eq!(manifest["config"]["seed"], 3);
    assert_eq!(manifest["truncation_guard"]["passed"], true);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let out = out.to_str().unwrap();

    let bad = write_config(tmp.path(), &SMALL.replace("coupling = 0.1", "coupling = -1.0"));
    assert_eq!(cli(&["--quiet", "--config", &bad, "--out", out, "run-exact"]).status.code(), Some(2));
    assert_eq!(cli(&["--quiet", "--config", "/nonexistent.toml", "validate"]).status.code(), Some(2));
    assert_eq!(cli(&["--quiet", "--out", out, "decay"]).status.code(), Some(2));
    assert_eq!(cli(&["--quiet", "--out", out, "sweep-n", "--n", "2,3"]).status.code(), Some(2));

    // narrow b modes at long times trip the truncation guard
    let narrow = write_config(
        tmp.path(),
        &SMALL
            .replace("coupling = 0.1", "coupling = 0.1\ndims = { a = 2, b = 2, c = 2 }")
            .replace("t_max = 1.0", "t_max = 10.0"),
    );
    let run = cli(&["--quiet", "--config", &narrow, "--out", out, "run-exact"]);
    assert_eq!(run.status.code(), Some(1));
    assert!(Path::new(out).join("series.csv").exists());

    assert_eq!(cli(&["--quiet", "--out", out, "validate"]).status.code(), Some(0));
}

#[test]
fn decay_flags_override_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("d");
    let run = cli(&["--quiet", "--config", &config, "--out", out.to_str().unwrap(), "decay", "--kappa", "0.2", "--n-traj", "4"]);
    assert!(run.status.success());
    let csv = std::fs::read_to_string(out.join("decay.csv")).unwrap();
    assert!(csv.starts_with("t,m,k1,k2,n_photon,norm_drift,emitted\n"));
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"kappa\": 0.2") && manifest.contains("extension"));
}

#[test]
fn compare_picks_the_mode_matching_the_exact_run() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = RunConfig::default().with_output_dir(tmp.path());
    for k2 in [K2Source::Initial, K2Source::Exact] {
        config.closure = Some(cavity_collective::experiments::ClosureSection {
            k2,
            sign_mode: SignMode::AsPrinted,
        });
        let out = compare_exact_vs_moments(&config).unwrap();
        assert_eq!(out.report.winner, Some(SignMode::Opposite));
        assert!(out.compare_path.exists() && out.report_path.exists());
        let header = std::fs::read_to_string(&out.compare_path).unwrap();
        assert!(header.starts_with("t,m_exact,m_as_printed,m_opposite,k2_exact\n"));
    }
}

#[test]
fn sweep_report_records_sign_and_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let config = RunConfig::default().with_output_dir(tmp.path());
    let out = run_sweep(&config, &[2, 3, 4]).unwrap();
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.report_path).unwrap()).unwrap();
    assert_eq!(report["measured_sign"], 1.0);
    assert_eq!(report["consistent_sign_mode"], "opposite");
    let csv = std::fs::read_to_string(out.scaling_path).unwrap();
    assert_eq!(csv.lines().next(), Some("N,rate"));
}

#[test]
fn validation_flags_an_injected_hamiltonian() {
    let config = RunConfig {
        grid: cavity_collective::dynamics::TimeGrid::new(1.0, 51).unwrap(),
        ..RunConfig::default()
    };
    let ops = ModelOperators::build(&config.params).unwrap();
    // a stray K1 term stays Hermitian but no longer commutes into g K1
    let one = num_complex::Complex64::new(1.0, 0.0);
    let skewed = ops.hamiltonian.combine(one, &ops.k1, one * 0.05).unwrap();
    let report = validate_suite_with_hamiltonian(&config, skewed).unwrap();
    assert!(!report.passed);
    assert!(!report.check("ehrenfest_identity_random_states").unwrap().passed);
    assert!(report.check("hamiltonian_hermitian").unwrap().passed);
    for name in ["ladder_commutator", "cross_mode_commutators", "observables_hermitian", "k2_reference_values"] {
        assert!(report.check(name).unwrap().passed, "{name}");
    }
}
