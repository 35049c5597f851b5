use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use levyrd_cli::{parse_threads, run, Command, Invocation};

#[derive(Parser)]
#[command(name = "levyrd", version, about = "Lévy-driven reaction–diffusion simulations and hypothesis checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monte Carlo ensemble of the grid scheme with per-time summaries.
    Simulate(Common),
    /// Shared-noise refinement ladder and decay-rate fit.
    Ladder(Common),
    /// Evaluate the configured parameter conditions.
    Gate(Common),
    /// Ensemble diagnostics: moment estimates, a-priori bound, spectral tail.
    Diagnose(Common),
    /// Draw one noise realisation.
    NoiseSample(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Refuse to simulate unless the [gate] block passes.
    #[arg(long)]
    gate: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, common) = match cli.command {
        Cmd::Simulate(c) => (Command::Simulate, c),
        Cmd::Ladder(c) => (Command::Ladder, c),
        Cmd::Gate(c) => (Command::Gate, c),
        Cmd::Diagnose(c) => (Command::Diagnose, c),
        Cmd::NoiseSample(c) => (Command::NoiseSample, c),
    };
    let threads = match parse_threads(std::env::var("LEVYRD_THREADS").ok().as_deref()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("levyrd: {e}");
            return ExitCode::from(1);
        }
    };
    let inv = Invocation {
        command,
        config: common.config,
        seed: common.seed,
        replicas: common.replicas,
        out: common.out,
        gate: common.gate,
        threads,
    };
    match run(&inv) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            println!("manifest: {}", outcome.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("levyrd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
