//! `conical`: manifest-driven runs of the metric, regularization, wave and
//! curve checks. Exit status 0 when every check passes, 1 when a check fails
//! or a run errors, 2 for an unusable manifest.

mod commands;
mod manifest;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use manifest::ManifestError;
use report::Report;

#[derive(Parser)]
#[command(name = "conical", version, about = "Conical spacetime toolkit runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues, pullback identity, spatial lower bound and Sobolev probe.
    VerifyMetric(RunArgs),
    /// Mollifier profiles, admissibility and regularized lower bounds.
    Regularize(RunArgs),
    /// Wave solver convergence, energy drift and eps studies.
    Wave(RunArgs),
    /// Slice crossings, reparametrization and curve-family extraction.
    Curves(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Manifest(ManifestError),
    Run(String),
}

fn execute(name: &'static str, args: &RunArgs) -> Result<Report, Failure> {
    let mut report = Report::new(name, args.seed, &args.manifest);
    let m = &args.manifest;
    let run = |res: commands::RunResult| res.map_err(|e| Failure::Run(e.to_string()));
    let prepare = |out: &Path| {
        std::fs::create_dir_all(out)
            .map_err(|e| Failure::Run(format!("cannot create {}: {e}", out.display())))
    };
    match name {
        "verify-metric" => {
            let man: manifest::VerifyMetric = manifest::load(m).map_err(Failure::Manifest)?;
            man.validate().map_err(Failure::Manifest)?;
            prepare(&args.out)?;
            run(commands::verify_metric(&man, &args.out, &mut report))?;
        }
        "regularize" => {
            let man: manifest::Regularize = manifest::load(m).map_err(Failure::Manifest)?;
            man.validate().map_err(Failure::Manifest)?;
            prepare(&args.out)?;
            run(commands::regularize(&man, &args.out, &mut report))?;
        }
        "wave" => {
            let man: manifest::Wave = manifest::load(m).map_err(Failure::Manifest)?;
            man.validate().map_err(Failure::Manifest)?;
            prepare(&args.out)?;
            run(commands::wave(&man, &args.out, &mut report))?;
        }
        "curves" => {
            let man: manifest::Curves = manifest::load(m).map_err(Failure::Manifest)?;
            man.clone().validate(m).map_err(Failure::Manifest)?;
            prepare(&args.out)?;
            run(commands::curves(&man, &args.out, &mut report))?;
        }
        _ => unreachable!("subcommand names are fixed"),
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::VerifyMetric(a) => ("verify-metric", a),
        Command::Regularize(a) => ("regularize", a),
        Command::Wave(a) => ("wave", a),
        Command::Curves(a) => ("curves", a),
    };
    match execute(name, args) {
        Ok(report) => {
            let path = args.out.join("report.json");
            if let Err(e) = conical_core::io::write_json(&path, &report) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
            for c in &report.checks {
                println!(
                    "{:<4}  {:<34} {:.3e}  ({})",
                    format!("{:?}", c.status).to_uppercase(),
                    c.name,
                    c.value,
                    c.criterion
                );
            }
            println!("report: {}", path.display());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Manifest(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
