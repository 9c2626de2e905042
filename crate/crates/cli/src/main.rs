//! Command-line driver: `run` executes a JSON scenario and writes CSV
//! artifacts; `verify` runs a seeded property suite and reports worst-case
//! margins.

mod config;
mod runner;
mod suites;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "relvac",
    about = "Solver and property-verification driver for barotropic relativistic flow with vacuum"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a scenario config and write CSV artifacts.
    ///
    /// Exit codes: 0 success, 1 config or verification error,
    /// 2 inadmissible scenario, 3 runtime solver error.
    Run {
        /// Path to the JSON scenario (five blocks: eos, grid, initial, run,
        /// verify).
        config: PathBuf,
        /// Output directory (default: ./out/<config-stem>/).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the seed of the config's verify block.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a property suite and print its worst-case margins.
    ///
    /// Exit codes: 0 all properties pass, 1 otherwise.
    Verify {
        /// One of: eos, kinematics, lorentz, matrices, certificate, all.
        suite: String,
        /// Samples per property.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Seed for the property samplers.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Run { config, out, seed } => runner::run(&config, out.as_deref(), seed),
        Cmd::Verify {
            suite,
            samples,
            seed,
        } => match suites::run_suite(&suite, samples, seed) {
            None => {
                eprintln!(
                    "unknown suite '{suite}' (expected one of: {}, all)",
                    suites::SUITE_NAMES.join(", ")
                );
                1
            }
            Some(reports) => {
                let mut all_passed = true;
                for r in &reports {
                    print!("{}", r.render());
                    all_passed &= r.passed();
                }
                if all_passed {
                    0
                } else {
                    1
                }
            }
        },
    };
    std::process::exit(code);
}
