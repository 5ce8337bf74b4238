use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use frostlab::harness::{fit_table, init_threads, parse_set, run, Experiment, ExperimentConfig, SetFile, Table};
use frostlab::sets::{validate_frostman, validate_kt, validate_kt_2d, validate_rect_kt};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "frostlab", version, about = "Desk-scale experiments on δ-discretized incidences, energies and sum-product growth")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Kt,
    Frostman,
    Rect,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Replaces the seed list of the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Main incidence bound on full shadings.
    Incidence(RunArgs),
    /// Heavy-square profile of a bush.
    Heavy(RunArgs),
    /// Trilinear parabola energy and its rectangle-incidence picture.
    Energy(RunArgs),
    /// L6 mass of the Fourier transform on growing balls.
    Fourier(RunArgs),
    /// Sum-set and ratio-set growth, few-sums pipeline.
    Sumprod(RunArgs),
    /// Projection survey of a product set.
    Projection(RunArgs),
    /// Regularity constant of a set file.
    Validate {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        s: f64,
    },
    /// Slope of log2 y against log2 x over a CSV table.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
}

fn experiment(name: Experiment, args: &RunArgs) -> anyhow::Result<()> {
    let config = ExperimentConfig::from_file(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    if config.experiment != name {
        bail!("config describes `{}`, not `{name}`", config.experiment);
    }
    let out = args
        .out
        .clone()
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("frostlab-out"));
    let outcome = run(&config, args.seed, &out)?;
    for f in &outcome.files {
        println!("{}", f.display());
    }
    if !outcome.truncated.is_empty() {
        eprintln!("warning: ladder truncated by the resource cap, dropped m = {:?}", outcome.truncated);
    }
    Ok(())
}

fn main_inner(cli: Cli) -> anyhow::Result<()> {
    init_threads()?;
    match &cli.command {
        Command::Incidence(a) => experiment(Experiment::Incidence, a),
        Command::Heavy(a) => experiment(Experiment::Heavy, a),
        Command::Energy(a) => experiment(Experiment::Energy, a),
        Command::Fourier(a) => experiment(Experiment::Fourier, a),
        Command::Sumprod(a) => experiment(Experiment::Sumprod, a),
        Command::Projection(a) => experiment(Experiment::Projection, a),
        Command::Validate { set, kind, s } => {
            let text = std::fs::read_to_string(set).with_context(|| format!("reading {}", set.display()))?;
            let cert = match (parse_set(&text)?, kind) {
                (SetFile::One(a), Kind::Kt) => validate_kt(&a, *s)?,
                (SetFile::One(a), Kind::Frostman) => validate_frostman(&a, *s)?,
                (SetFile::Two(p), Kind::Kt) => validate_kt_2d(&p, *s)?,
                (SetFile::Two(p), Kind::Rect) => validate_rect_kt(&p, *s)?,
                (SetFile::One(_), Kind::Rect) => bail!("rect needs a set2d file"),
                (SetFile::Two(_), Kind::Frostman) => bail!("frostman needs a set1d file"),
            };
            println!(
                "kind={:?} s={} constant={} count={} net_factor={} witness={:?}",
                cert.kind, cert.exponent, cert.constant, cert.count, cert.net_factor, cert.witness
            );
            Ok(())
        }
        Command::Fit { csv, x, y } => {
            let text = std::fs::read_to_string(csv).with_context(|| format!("reading {}", csv.display()))?;
            let f = fit_table(&Table::parse(&text)?, x, y)?;
            println!("slope={} intercept={} max_residual={} points={}", f.slope, f.intercept, f.max_residual, f.points.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
