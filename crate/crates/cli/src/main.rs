use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relaynet_cli::{cmd_bound, cmd_dry_run, cmd_rate, cmd_simulate, gen_net, CliError, Overrides, Result};

/// Source-channel rates, cut-set bounds and protocol simulation for
/// relay-broadcast networks with side information.
#[derive(Parser)]
#[command(name = "relaynet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize the achievable rate over input laws and cooperation plans.
    Rate(Overrides),
    /// Evaluate the cut-set bound; `--certify` adds the degraded capacity.
    Bound(Overrides),
    /// Run a protocol simulation ladder and write a CSV table.
    Simulate(Overrides),
    /// Print the document of a built-in network.
    GenNet {
        /// Built-in network name.
        #[arg(long)]
        net: String,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Rate(o) => {
            let cfg = o.resolve()?;
            emit(cfg.out.as_deref(), &json(&cmd_rate(&cfg)?))
        }
        Command::Bound(o) => {
            let cfg = o.resolve()?;
            emit(cfg.out.as_deref(), &json(&cmd_bound(&cfg)?))
        }
        Command::Simulate(o) => {
            let cfg = o.resolve()?;
            if cfg.simulation.dry_run {
                return emit(cfg.out.as_deref(), &cmd_dry_run(&cfg)?);
            }
            let table = cmd_simulate(&cfg)?;
            eprintln!("threshold r* = {}", table.threshold);
            emit(cfg.out.as_deref(), &table.to_csv()?)
        }
        Command::GenNet { net, out } => emit(out.as_deref(), &gen_net(&net)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
