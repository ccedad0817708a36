//! `dk`: validate DK-triples, build their pointed categories, and normalize
//! or denormalize matrix diagrams.
//!
//! Exit codes: 0 when every check passes, 1 when a check or validation
//! fails, 2 on unreadable or malformed input.

mod commands;
mod refs;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dk_core::exactla::Ring;

use report::Report;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, missing files, malformed documents.
    Input(String),
    /// Input was read but failed validation.
    Failed(String),
}

#[derive(Parser)]
#[command(name = "dk", version, about = "DK-triples and exact Dold-Kan normalization")]
struct Cli {
    /// Coefficient field: Q or Fp:p.
    #[arg(long, global = true, env = "DK_RING", default_value = "Q")]
    ring: String,
    /// Print the machine-readable report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the machine-readable report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    N0,
    V,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Min,
    Max,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms and print the pairing grids.
    Validate {
        #[arg(long)]
        triple: String,
    },
    /// Emit N₀ or V as a pointed category file.
    Build {
        #[arg(long)]
        triple: String,
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a preset triple file, or list the preset families.
    Preset {
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalize a diagram on the triple's category to a pointed diagram on N₀.
    Normalize {
        #[arg(long)]
        triple: String,
        #[arg(long)]
        diagram: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Witness file; defaults to OUT with a `.witness.json` suffix.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Rebuild a diagram on the triple's category from a pointed diagram on N₀.
    Denormalize {
        #[arg(long)]
        triple: String,
        #[arg(long)]
        diagram: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check both round trips; without --diagram, on every representable.
    Roundtrip {
        #[arg(long)]
        triple: String,
        #[arg(long)]
        diagram: Vec<String>,
    },
    /// Compare direct (co)limit dimensions with the normalization witness.
    Audit {
        #[arg(long)]
        triple: String,
        #[arg(long)]
        diagram: String,
    },
    /// Decide k-truncation by both criteria.
    KanCheck {
        #[arg(long)]
        triple: String,
        #[arg(long)]
        diagram: String,
        #[arg(long)]
        level: usize,
    },
    /// Betti numbers of a simplicial preset, with the Moore complex check.
    Homology {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "min")]
        variant: Variant,
    },
    /// Normalized chain complex of a simplicial preset along a Δ triple.
    Dk {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        simplicial: String,
    },
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let ring: Ring = cli
        .ring
        .parse()
        .map_err(|e| CliError::Input(format!("--ring {}: {e}", cli.ring)))?;
    match &cli.command {
        Command::Validate { triple } => commands::validate(triple),
        Command::Build { triple, target, out } => {
            commands::build(triple, matches!(target, Target::V), out.as_deref())
        }
        Command::Preset { name, out } => commands::preset(name.as_deref(), out.as_deref()),
        Command::Normalize {
            triple,
            diagram,
            out,
            witness,
        } => commands::normalize(triple, diagram, ring, out.as_deref(), witness.as_deref()),
        Command::Denormalize { triple, diagram, out } => {
            commands::denormalize(triple, diagram, ring, out.as_deref())
        }
        Command::Roundtrip { triple, diagram } => commands::roundtrip(triple, diagram, ring),
        Command::Audit { triple, diagram } => commands::audit(triple, diagram, ring),
        Command::KanCheck { triple, diagram, level } => commands::kan_check(triple, diagram, *level, ring),
        Command::Homology { preset, k, variant } => {
            commands::homology(preset, *k, matches!(variant, Variant::Max), ring)
        }
        Command::Dk { preset, simplicial } => commands::dk(preset, simplicial, ring),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let json = report.to_json();
            if let Some(path) = &cli.report {
                if let Err(e) = std::fs::write(path, &json) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if cli.json {
                print!("{json}");
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(if report.passed() { 0 } else { 1 })
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("failed: {msg}");
            ExitCode::from(1)
        }
    }
}
