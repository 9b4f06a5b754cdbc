use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nmf_forge_cli::synth_cmd::{self, SynthArgs};
use nmf_forge_cli::{env_seed, pipeline, CommandKind, RunConfig, RunOverrides};

/// Topic modeling over plain-text corpora with non-negative matrix
/// factorization: classical, semantic (co-occurrence coupled),
/// hierarchical, and (semi-)supervised variants.
#[derive(Parser)]
#[command(name = "nmf-forge", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    overrides: RunOverrides,
    /// JSON config file; explicit flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Classical topic factorization of the tf-idf matrix
    Nmf(RunArgs),
    /// Factorization coupled with the word co-occurrence SPPMI matrix
    Semantic(RunArgs),
    /// Recursive top-down topic hierarchy
    HnmfTopdown(RunArgs),
    /// Layered bottom-up topic hierarchy
    HnmfBottomup(RunArgs),
    /// Supervised classification over a physical train/test split
    Snmf(RunArgs),
    /// Semi-supervised classification with masked label columns
    Ssnmf(RunArgs),
    /// Generate a planted synthetic corpus with labels
    Synth(SynthArgs),
}

fn execute(command: Command) -> anyhow::Result<String> {
    let (kind, args) = match command {
        Command::Synth(args) => return synth_cmd::run(&args, env_seed()),
        Command::Nmf(args) => (CommandKind::Nmf, args),
        Command::Semantic(args) => (CommandKind::Semantic, args),
        Command::HnmfTopdown(args) => (CommandKind::HnmfTopdown, args),
        Command::HnmfBottomup(args) => (CommandKind::HnmfBottomup, args),
        Command::Snmf(args) => (CommandKind::Snmf, args),
        Command::Ssnmf(args) => (CommandKind::Ssnmf, args),
    };
    let config = RunConfig::resolve(kind, args.overrides, args.config.as_ref(), env_seed())?;
    let output = pipeline::run(&config)?;
    pipeline::write_outputs(&config.out, &output)?;
    Ok(format!(
        "{}\nreports: {} and {}",
        output.summary,
        config.out.join("report.json").display(),
        config.out.join("report.txt").display()
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
