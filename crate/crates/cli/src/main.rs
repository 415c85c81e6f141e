use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde_json::json;

mod commands;
mod config;
mod report;

use config::RunConfig;
use report::RunReport;

#[derive(Parser, Debug)]
#[command(
    name = "majorana",
    version,
    about = "Majorana spinor recovery and Cauchy evolution checks"
)]
struct Cli {
    /// Also write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gamma-matrix identities and spinor algebra on random spinors.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
    /// The explicit frame example for one or more masses.
    Example {
        #[arg(long = "mass", value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        masses: Vec<f64>,
        #[arg(long, num_args = 3, value_names = ["X1", "X2", "X3"], allow_negative_numbers = true)]
        probe: Option<Vec<f64>>,
    },
    /// Recover the matter field from the current of an analytic solution.
    Roundtrip {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of probe points.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: Option<u64>,
    },
    /// Lattice evolution of the potential with constraint monitoring.
    Evolve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        csv_dir: Option<PathBuf>,
    },
    /// Fourth time derivatives from hyperplane data against the evolved lattice.
    FourthDeriv {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Time of the hyperplane.
        #[arg(long)]
        at: Option<f64>,
    },
}

fn load(path: &Option<PathBuf>, base: RunConfig) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p, base),
        None => Ok(base),
    }
}

fn run(cli: &Cli) -> Result<RunReport> {
    let start = Instant::now();
    let (name, config, outcome) = match &cli.command {
        Command::Verify { seed, trials } => (
            "verify",
            json!({ "seed": seed, "trials": trials }),
            commands::verify(*seed, *trials as usize),
        ),
        Command::Example { masses, probe } => {
            let probe = probe.as_ref().map_or([0.0; 3], |p| [p[0], p[1], p[2]]);
            (
                "example",
                json!({ "masses": masses, "probe": probe }),
                commands::example(masses, probe),
            )
        }
        Command::Roundtrip {
            config,
            seed,
            trials,
        } => {
            let mut cfg = load(config, RunConfig::default())?;
            if let Some(s) = seed {
                cfg.seed = *s;
            }
            if let Some(t) = trials {
                cfg.points = *t as usize;
            }
            let out = commands::roundtrip(&cfg)?;
            ("roundtrip", serde_json::to_value(&cfg)?, out)
        }
        Command::Evolve { config, csv_dir } => {
            let cfg = load(config, RunConfig::default())?;
            let out = commands::evolve(&cfg, csv_dir.as_deref())?;
            let mut echo = serde_json::to_value(&cfg)?;
            echo["sim"]["margin"] = json!(cfg.simulation().margin);
            ("evolve", echo, out)
        }
        Command::FourthDeriv { config, at } => {
            let mut cfg = load(config, RunConfig::end_to_end_defaults())?;
            if let Some(t) = at {
                cfg.at = *t;
            }
            let out = commands::fourth_deriv(&cfg)?;
            ("fourth-deriv", serde_json::to_value(&cfg)?, out)
        }
    };
    Ok(RunReport {
        command: name.to_string(),
        config,
        checks: outcome.checks,
        data: outcome.data,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let _ = writeln!(std::io::stdout().lock(), "{}", report.to_json());
            if let Some(path) = &cli.out {
                if let Err(e) = report.write(path) {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(2);
                }
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
