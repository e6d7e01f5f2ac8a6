use std::path::PathBuf;
use std::process::ExitCode;

use cavity_collective::experiments::{
    compare_exact_vs_moments, run_decay, run_rates, run_scenario, run_sweep, run_validation, DecaySection, RunConfig,
};
use cavity_collective::Error;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(version, about = "Collective three-mode cavity coupling: exact dynamics and moment equations")]
struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Only warnings and errors on stderr, no summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Operator-algebra, symmetry and dynamics self-checks.
    Validate,
    /// Exact propagation, writes series.csv.
    RunExact,
    /// Closed moment equations, writes rates.csv.
    RunRates,
    /// Exact m(t) against the moment equations under both sign modes.
    Compare,
    /// Exact initial dk1/dt against the particle number.
    SweepN {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
        n: Vec<usize>,
    },
    /// Quantum-jump trajectories with cavity loss, writes decay.csv.
    Decay {
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        n_traj: Option<usize>,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let mut config = load_config(cli)?;
    let say = |line: String| {
        if !cli.quiet {
            println!("{line}");
        }
    };
    match &cli.command {
        Command::Validate => {
            let out = run_validation(&config)?;
            for c in &out.report.checks {
                let status = if c.passed { "ok  " } else { "FAIL" };
                say(format!("{status} {:<36} {:>12.3e} <= {:.1e}  {}", c.name, c.measured, c.tolerance, c.detail));
            }
            say(format!("report: {}", out.report_path.display()));
            Ok(out.report.passed)
        }
        Command::RunExact => {
            let out = run_scenario(&config)?;
            say(format!("wrote {} ({} samples)", out.series_path.display(), out.series.len()));
            if !out.guard.passed {
                eprintln!("truncation guard failed; see {}", out.manifest_path.display());
            }
            Ok(out.guard.passed)
        }
        Command::RunRates => {
            let out = run_rates(&config)?;
            say(format!(
                "initial m = {:.6e}, k1 = {:.6e}, k2 = {:.6e}; wrote {}",
                out.initial.m,
                out.initial.k1,
                out.initial.k2,
                out.rates_path.display()
            ));
            Ok(true)
        }
        Command::Compare => {
            let out = compare_exact_vs_moments(&config)?;
            for e in &out.report.errors {
                say(format!(
                    "{:?}: max |dm| = {:.3e}, early window {:.3e}",
                    e.sign_mode, e.max_abs_error, e.early_max_abs_error
                ));
            }
            say(format!("winner: {:?}; wrote {}", out.report.winner, out.compare_path.display()));
            if !out.report.truncation_guard.passed {
                eprintln!("truncation guard failed for the exact run");
            }
            Ok(out.report.truncation_guard.passed)
        }
        Command::SweepN { n } => {
            let out = run_sweep(&config, n)?;
            let r = &out.report;
            for p in &r.points {
                say(format!("N = {:>2}  dk1/dt = {:.12e}", p.n, p.rate));
            }
            say(format!(
                "slope {:.6e}, intercept {:.6e}, max residual {:.1e}; consistent sign mode {:?}",
                r.fit.slope, r.fit.intercept, r.fit.max_residual, r.consistent_sign_mode
            ));
            Ok(true)
        }
        Command::Decay { kappa, n_traj } => {
            if kappa.is_some() || n_traj.is_some() {
                let section = config.decay.clone();
                let kappa = kappa
                    .or(section.as_ref().map(|d| d.kappa))
                    .ok_or_else(|| Error::Config("decay needs --kappa or a [decay] section".into()))?;
                let n_traj = n_traj.or(section.map(|d| d.n_traj)).unwrap_or(100);
                config.decay = Some(DecaySection { kappa, n_traj });
                config.validate()?;
            }
            let out = run_decay(&config)?;
            let emitted = out.run.emitted.last().copied().unwrap_or(0.0);
            say(format!(
                "{} trajectories, mean emitted photons {:.4}; wrote {}",
                out.run.jumps_per_trajectory.len(),
                emitted,
                out.decay_path.display()
            ));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 1 })
        }
    }
}
