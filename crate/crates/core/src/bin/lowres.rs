use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lowres_core::commands::{run, Command, RunSpec};

/// Coupled Kerr oscillators and finite-resolution measurement experiments.
#[derive(Debug, Parser)]
#[command(name = "lowres", version)]
struct Cli {
    /// trajectory, hbar-scan, entropy, reduced-density, revivals, cat-fidelity,
    /// fig2, commutator-sweep, ehrenfest, schmidt-sweep, selftest
    command: String,

    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory for CSV artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Override a configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Worker threads for parallel sweeps.
    #[arg(long)]
    threads: Option<usize>,

    /// Neglected Poisson tail mass per mode in the Fock oracle.
    #[arg(long = "tail-eps")]
    tail_eps: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command: Command = match cli.command.parse() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("lowres: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("lowres: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let spec = RunSpec { command, config: cli.config, out_dir: cli.out, overrides: cli.set, tail_eps: cli.tail_eps };
    match run(&spec) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("lowres: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
