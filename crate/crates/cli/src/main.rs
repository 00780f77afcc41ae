use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cosserat_cli::config::{Config, CONFIG_ENV};
use cosserat_cli::simulate::{self, Overrides};
use cosserat_cli::suites::run_suite;
use cosserat::weyssenhoff::WeyssenhoffError;

#[derive(Parser)]
#[command(name = "cosserat", version, about = "Verification suites and worldline simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Algebra,
    Forms,
    Cosserat,
    Dirac,
    Weyssenhoff,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Forms => "forms",
            Suite::Cosserat => "cosserat",
            Suite::Dirac => "dirac",
            Suite::Weyssenhoff => "weyssenhoff",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    WeyssenhoffWorldline,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite.
    Suite {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Config file; the environment variable COSSERAT_CONFIG takes precedence.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Grid sizes per axis, coarse to fine.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<usize>>,
    },
    /// Integrate a worldline and write the trajectory.
    Simulate {
        #[arg(long, value_enum, default_value = "weyssenhoff-worldline")]
        kind: Kind,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Trajectory file; `.json` for JSON, anything else for CSV.
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        dtau: Option<f64>,
    },
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Suite { suite, config, json, seed, grid } => {
            let mut cfg = match Config::resolve(config.as_deref()) {
                Ok(c) => c.suite,
                Err(e) => return usage(e),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(g) = grid {
                cfg.grids = g;
            }
            if let Err(e) = cfg.validate() {
                return usage(e);
            }
            let report = run_suite(suite.name(), &cfg).expect("suite names come from the enum");
            println!("{report}");
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&report).expect("report serializes");
                if let Err(e) = std::fs::write(&path, text) {
                    return usage(format!("cannot write {}: {e}", path.display()));
                }
            }
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Command::Simulate { kind: Kind::WeyssenhoffWorldline, config, output, steps, dtau } => {
            let cfg = match Config::resolve(config.as_deref()) {
                Ok(c) => c.worldline,
                Err(e) => return usage(e),
            };
            let Some(cfg) = cfg else {
                return usage(format!("config has no [worldline] table (pass --config or set {CONFIG_ENV})"));
            };
            let (tr, summary) = match simulate::run(&cfg, Overrides { steps, dtau }) {
                Ok(r) => r,
                Err(e @ (WeyssenhoffError::ConstraintDrift { .. } | WeyssenhoffError::ClosureUnsolvable { .. })) => {
                    eprintln!("simulation failed: {e}");
                    return ExitCode::from(1);
                }
                Err(e) => return usage(format!("simulation refused: {e}")),
            };
            match simulate::write(&tr, &summary, &output) {
                Ok(diag) => {
                    let d = summary.diagnostics;
                    println!(
                        "wrote {} records to {} (diagnostics in {})",
                        summary.records,
                        output.display(),
                        diag.display()
                    );
                    println!(
                        "max |u.u - c^2| {:.3e}  max |s u| {:.3e}  spin norm drift {:.3e}  closure residual {:.3e}",
                        d.max_mass_shell, d.max_frenkel, d.max_spin_norm_drift, d.max_closure_residual
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => usage(format!("cannot write {}: {e}", output.display())),
            }
        }
    }
}
