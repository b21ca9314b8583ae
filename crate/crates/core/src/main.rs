use clap::{Parser, Subcommand};
use kgspec::harness::{
    self, compare_methods, emit_constants, exit_code_for, run_scenario, selftest, Scenario, EXIT_BOUND_FAILURE,
    EXIT_OK,
};
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kgspec", version, about = "Klein-Gordon spectra on bounded domains and universal eigenvalue inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenario files and write their report bundles.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Scenarios to run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Tabulate eigenvalues across refinements and discretizations.
    Compare { config: PathBuf },
    /// Print the closed-form constants for dimension D.
    Constants {
        d: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run the exact-identity suites (no spectra).
    Selftest {
        #[arg(long, default_value_t = harness::config::DEFAULT_SEED)]
        seed: u64,
    },
}

fn run_one(path: &Path) -> i32 {
    let outcome = Scenario::load(path).and_then(|s| run_scenario(&s));
    match outcome {
        Ok(o) => {
            let s = &o.summary;
            println!(
                "{}: {} reports, {} passed, {} failed -> {}",
                s.name,
                s.total,
                s.passed,
                s.failed,
                o.dir.display()
            );
            for (check, n) in &s.failures {
                println!("  {check}: {n} failed");
            }
            s.exit_code
        }
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            exit_code_for(&e)
        }
    }
}

fn dispatch(cli: Cli) -> i32 {
    match cli.command {
        Command::Run { configs, jobs } => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("thread pool: {e}");
                    return harness::EXIT_CONFIG_ERROR;
                }
            };
            let codes: Vec<i32> = if jobs > 1 {
                pool.install(|| configs.par_iter().map(|p| run_one(p)).collect())
            } else {
                configs.iter().map(|p| run_one(p)).collect()
            };
            codes.into_iter().max().unwrap_or(EXIT_OK)
        }
        Command::Compare { config } => match Scenario::load(&config).and_then(|s| compare_methods(&s)) {
            Ok(t) => {
                println!("{}: {} levels", t.domain, t.levels.len());
                if let Some(d) = t.max_relative_discrepancy {
                    println!("max relative discrepancy vs Galerkin: {d:.3e}");
                }
                EXIT_OK
            }
            Err(e) => {
                eprintln!("{}: {e}", config.display());
                exit_code_for(&e)
            }
        },
        Command::Constants { d, json } => match emit_constants(d) {
            Ok(list) if json => {
                let doc = serde_json::json!({ "schema": 1, "d": d, "constants": list });
                println!("{}", serde_json::to_string_pretty(&doc).expect("constants serialize"));
                EXIT_OK
            }
            Ok(list) => {
                for c in list {
                    println!("{:<14} {:>22.15e}  {}", c.name, c.value, c.anchor);
                }
                EXIT_OK
            }
            Err(e) => {
                eprintln!("{e}");
                harness::EXIT_CONFIG_ERROR
            }
        },
        Command::Selftest { seed } => match selftest::run_selftest(seed) {
            Ok(lines) => {
                let mut code = EXIT_OK;
                for l in lines {
                    println!("[{}] {}: {}", if l.pass { "PASS" } else { "FAIL" }, l.name, l.detail);
                    if !l.pass {
                        code = EXIT_BOUND_FAILURE;
                    }
                }
                code
            }
            Err(e) => {
                eprintln!("{e}");
                exit_code_for(&e)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(harness::EXIT_CONFIG_ERROR as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    ExitCode::from(dispatch(cli) as u8)
}
