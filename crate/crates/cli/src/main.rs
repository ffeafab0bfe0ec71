use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ghlab_cli::commands::diag;
use ghlab_cli::{execute, Command, ExperimentConfig, Overrides};

/// Numerical experiments on Gibbons–Hawking hyperkähler metrics built from
/// holomorphic data on the disc.
#[derive(Debug, Parser)]
#[command(name = "ghlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config; defaults apply when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tessellation depth override.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Grid resolution override for the invoked command.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

const DEFAULT_OUT: &str = "ghlab-out";

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = cli.command.name();
    let mut cfg = match &cli.config {
        Some(p) => match ExperimentConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                diag(&[("command", &name), ("status", &"config_error"), ("error", &e)]);
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::default(),
    };
    let overrides = Overrides {
        depth: cli.depth,
        grid: cli.grid,
        seed: cli.seed,
    };
    if let Err(e) = overrides.apply(&mut cfg, cli.command) {
        diag(&[("command", &name), ("status", &"config_error"), ("error", &e)]);
        return ExitCode::from(2);
    }
    let out = cli.out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    match execute(cli.command, &cfg, &out) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            let status = if e.exit_code() == 2 { "config_error" } else { "error" };
            diag(&[("command", &name), ("status", &status), ("error", &e)]);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
