//! Command-line front end: run scenarios (bundled or from files), list the
//! bundled ones, sweep randomized oracle-equivalence checks, and verify the
//! proof identities. The process exits nonzero if any requested run
//! disagrees with its prediction, so the commands gate CI directly.

use clap::{Parser, Subcommand};
use satcon::analysis::verify_proof_identities;
use satcon::dynamics::SimConfig;
use satcon::harness::{
    self, builtin_description, builtin_names, builtin_scenario, random, read_scenario, Regime,
    Scenario, SweepConfig,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "satcon",
    version,
    about = "Saturated-output consensus simulator and analyzer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenarios (bundled names or scenario files).
    Run {
        /// Bundled scenario names or paths to scenario files.
        #[arg(required = true)]
        scenarios: Vec<String>,
        /// Directory for trajectory CSV and summary JSON outputs.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the integration step.
        #[arg(long)]
        dt: Option<f64>,
        /// Override the horizon.
        #[arg(long)]
        t_end: Option<f64>,
        /// Override every seed in the scenario (network and initial state).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the bundled scenarios.
    ListBuiltins,
    /// Randomized oracle-equivalence sweep per regime.
    Sweep {
        /// Scenarios per regime.
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Master seed; scenario k uses seed + k.
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Restrict to one regime (fixed-homogeneous, fixed-heterogeneous,
        /// time-varying, double-integrator, directed).
        #[arg(long)]
        regime: Option<String>,
        /// Horizon per scenario.
        #[arg(long, default_value_t = 500.0)]
        t_end: f64,
    },
    /// Check the algebraic identities behind the convergence arguments.
    Identities {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0x1d5)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenarios,
            out,
            dt,
            t_end,
            seed,
        } => cmd_run(&scenarios, &out, dt, t_end, seed),
        Command::ListBuiltins => {
            for name in builtin_names() {
                println!("{name:8} {}", builtin_description(name).unwrap_or(""));
            }
            ExitCode::SUCCESS
        }
        Command::Sweep {
            count,
            seed,
            regime,
            t_end,
        } => cmd_sweep(count, seed, regime.as_deref(), t_end),
        Command::Identities { samples, seed } => cmd_identities(samples, seed),
    }
}

fn load_scenario(spec: &str) -> Result<Scenario, String> {
    if let Some(s) = builtin_scenario(spec) {
        return Ok(s);
    }
    let path = Path::new(spec);
    if path.exists() {
        return read_scenario(path).map_err(|e| e.to_string());
    }
    Err(format!(
        "`{spec}` is neither a bundled scenario nor an existing file; \
         see `satcon list-builtins`"
    ))
}

fn apply_overrides(
    mut s: Scenario,
    dt: Option<f64>,
    t_end: Option<f64>,
    seed: Option<u64>,
) -> Result<Scenario, String> {
    if dt.is_some() || t_end.is_some() {
        let dt = dt.unwrap_or(s.sim.dt);
        let t_end = t_end.unwrap_or(s.sim.t_end);
        let method = s.sim.method;
        s.sim = SimConfig::new(dt, t_end)
            .map_err(|e| e.to_string())?
            .with_method(method);
    }
    if let Some(seed) = seed {
        if let harness::NetworkSpec::Random { seed: s_net, .. } = &mut s.network {
            *s_net = seed;
        }
        if let harness::InitialSpec::Uniform { seed: s_init, .. } = &mut s.initial {
            *s_init = seed.wrapping_add(1);
        }
    }
    Ok(s)
}

fn cmd_run(
    specs: &[String],
    out_dir: &Path,
    dt: Option<f64>,
    t_end: Option<f64>,
    seed: Option<u64>,
) -> ExitCode {
    if let Err(e) = std::fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return ExitCode::FAILURE;
    }
    let mut all_agree = true;
    for spec in specs {
        let scenario = match load_scenario(spec).and_then(|s| apply_overrides(s, dt, t_end, seed)) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        };
        let output = match harness::run(&scenario) {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: scenario `{}` failed: {e}", scenario.name);
                return ExitCode::FAILURE;
            }
        };
        let csv_path = out_dir.join(format!("{}.csv", scenario.name));
        let summary_path = out_dir.join(format!("{}.summary.json", scenario.name));
        if let Err(e) = harness::export_csv(&output.trajectory, &csv_path)
            .and_then(|_| harness::export_summary(&output.summary, &summary_path))
        {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
        let s = &output.summary;
        println!(
            "{:8} expected={} observed={} agreement={} condition={:+.4} threshold={:.4} ({:.2}s)",
            s.scenario,
            s.prediction.consensus_expected,
            s.diagnostics.consensus_observed,
            s.diagnostics.agreement_with_prediction,
            s.prediction.condition_value,
            s.prediction.threshold,
            s.wall_time_s,
        );
        all_agree &= s.diagnostics.agreement_with_prediction;
    }
    if all_agree {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn cmd_sweep(count: usize, seed: u64, regime: Option<&str>, t_end: f64) -> ExitCode {
    let regimes: Vec<Regime> = match regime {
        None => Regime::ALL.to_vec(),
        Some(label) => match Regime::from_label(label) {
            Some(r) => vec![r],
            None => {
                eprintln!(
                    "error: unknown regime `{label}`; known: {}",
                    Regime::ALL.map(|r| r.label()).join(", ")
                );
                return ExitCode::FAILURE;
            }
        },
    };
    let cfg = SweepConfig {
        count,
        master_seed: seed,
        t_end,
        ..SweepConfig::default()
    };
    println!(
        "{:<22} {:>5} {:>8} {:>8} {:>9} {:>12} {:>6}",
        "regime", "runs", "expect+", "expect-", "agree", "max drift", "lyap"
    );
    let mut ok = true;
    for regime in regimes {
        let outcome = match harness::run_sweep(regime, &cfg) {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: sweep {} failed: {e}", regime.label());
                return ExitCode::FAILURE;
            }
        };
        let pass = outcome.all_agree();
        ok &= pass;
        println!(
            "{:<22} {:>5} {:>8} {:>8} {:>9} {:>12.3e} {:>6} {}",
            regime.label(),
            outcome.results.len(),
            outcome.expected_true(),
            outcome.results.len() - outcome.expected_true(),
            format!("{}/{}", outcome.agreements(), outcome.results.len()),
            outcome.max_drift(),
            outcome.lyapunov_violations(),
            if pass { "PASS" } else { "FAIL" },
        );
        if !pass {
            eprintln!("  mismatched scenario indices: {:?}", outcome.mismatches());
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn cmd_identities(samples: usize, seed: u64) -> ExitCode {
    use rand::SeedableRng;
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let undirected = match random::connected_graph(8, 0.4, 0.5, 1.5, &mut rng) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let directed = harness::directed_experiment_graph();
    let mut ok = true;
    for (label, g) in [("undirected", &undirected), ("directed", &directed)] {
        match verify_proof_identities(g, samples, seed) {
            Ok(report) => {
                let pass = report.total_failures() == 0;
                ok &= pass;
                println!(
                    "{label:10} samples={} failures={} worst_rel_err={:.3e} {}",
                    report.samples,
                    report.total_failures(),
                    report.worst_relative_error,
                    if pass { "PASS" } else { "FAIL" }
                );
                for line in &report.counterexamples {
                    eprintln!("  counterexample: {line}");
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
