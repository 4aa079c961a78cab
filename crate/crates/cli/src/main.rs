//! `svsection`: cross-section factors, convergence tables and fuzz campaigns.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use svsection_core::fuzz::corpus_csv;
use svsection_core::mesh::ELEMENT_BUDGET_ENV;
use svsection_core::pipeline::write_fields;
use svsection_core::{load_section, FuzzConfig, RunConfig};

/// Exit status when a run completed but an asserted bound failed.
const EXIT_BOUND_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "svsection", version, about = "Shear, torsion, extension and bending factors of rod cross sections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a refinement ladder and write the factor report (JSON).
    Compute(ComputeArgs),
    /// Write a per-level convergence table (CSV).
    Converge(LadderArgs),
    /// Run a seeded admissible-field campaign and write the corpus (CSV).
    Fuzz(FuzzArgs),
}

#[derive(Args)]
struct LadderArgs {
    /// Section definition file (JSON).
    #[arg(long)]
    section: PathBuf,
    /// Target element size of the coarsest level.
    #[arg(long)]
    h: Option<f64>,
    /// Number of mesh levels.
    #[arg(long, default_value_t = 3)]
    refinements: usize,
    /// Poisson ratios for the shear factors; defaults to 0 and the material value.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    nu: Option<Vec<f64>>,
    #[arg(long)]
    out: PathBuf,
    /// Maximum number of triangles on any level.
    #[arg(long, env = ELEMENT_BUDGET_ENV)]
    element_budget: Option<usize>,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    ladder: LadderArgs,
    /// Also write the finest-level fields as legacy VTK.
    #[arg(long)]
    fields: Option<PathBuf>,
}

#[derive(Args)]
struct FuzzArgs {
    /// Section files; repeat the flag or separate with commas.
    #[arg(long, value_delimiter = ',', required = true)]
    section: Vec<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Element size; defaults to a sixteenth of each section's diameter.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

fn run_config(args: &LadderArgs) -> Result<RunConfig> {
    let spec = load_section(&args.section)?;
    let mut config = RunConfig::new(spec);
    config.h = args.h;
    config.refinements = args.refinements;
    config.nu = args.nu.clone();
    if let Some(b) = args.element_budget {
        config.budget = b;
    }
    Ok(config)
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn compute(args: &ComputeArgs) -> Result<bool> {
    let config = run_config(&args.ladder)?;
    let (report, fields) = svsection_core::compute(&config)?;
    write(&args.ladder.out, &report.to_json())?;
    if let Some(path) = &args.fields {
        write_fields(&fields, path)?;
    }
    for c in report.provenance.checks.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {} = {:e} (limit {:e})", c.id, c.value, c.limit);
    }
    Ok(report.all_checks_passed())
}

fn converge(args: &LadderArgs) -> Result<bool> {
    let config = run_config(args)?;
    let (_, table) = svsection_core::converge(&config)?;
    write(&args.out, &table)?;
    Ok(true)
}

fn fuzz(args: &FuzzArgs) -> Result<bool> {
    let sections = args.section.iter().map(load_section).collect::<svsection_core::Result<Vec<_>>>()?;
    let mut config = FuzzConfig::new(sections, args.samples, args.seed);
    config.h = args.h;
    let (rows, violations) = svsection_core::fuzz(&config)?;
    write(&args.out, &corpus_csv(&rows))?;
    eprintln!("{} rows, {} violation(s)", rows.len(), violations);
    Ok(violations == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Compute(a) => compute(a),
        Command::Converge(a) => converge(a),
        Command::Fuzz(a) => fuzz(a),
    };
    eprintln!("elapsed {:.2} s", start.elapsed().as_secs_f64());
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_BOUND_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
