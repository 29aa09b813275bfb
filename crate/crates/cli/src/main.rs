mod error;
mod eval;
mod job;
mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use expfam_div::families::{catalog, lookup};
use expfam_div::verify::{verify_all, verify_family, VerifyConfig};
use expfam_div::FamilyOptions;

use error::CliError;
use job::{Format, Job};

const JOB_HELP: &str = "\
A job file is a JSON object:
  family          family id (see `list-families`)
  family_options  {shape, dim, covariance}; covariance as a row-major lower triangle
  densities       [{name, params: {<parameter>: number | list}}]; matrices as row-major lower triangles
  measures        [{kind, alpha, method, alpha_step, omega, oracle}]
                  kind: bhat | bhat_distance | hellinger | alpha | chernoff | kl | jeffreys | jsd | cs
                  method (kl only): auto | log_ratio | entropy_moment | limit | quadrature | monte_carlo
                  oracle: {abs_tol, rel_tol, max_subdivisions, mc_samples, seed, tail_mass_cutoff}
  pairs           [[a, b], ...] evaluated by `compute` (default: every a before b)
  output          {format: csv | json, path}; standard output without a path

Directional measures follow the colon convention: kl(a,b) = D_KL[p_a : p_b],
and matrix cell (row, col) holds D[row : col].

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 numeric failure.
EXPFAM_DIV_SEED overrides the default oracle seed.";

#[derive(Parser)]
#[command(
    name = "expfam-div",
    version,
    about = "Cumulant-free divergences between exponential-family densities"
)]
#[command(after_help = JOB_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every measure on the job's pairs.
    #[command(after_help = JOB_HELP)]
    Compute { job: PathBuf },
    /// Evaluate every measure on all ordered pairs, one square grid per measure.
    #[command(after_help = JOB_HELP)]
    Matrix { job: PathBuf },
    /// Run the invariant and oracle checks.
    Verify {
        /// Restrict to one family id.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the registered family ids.
    ListFamilies,
}

fn load(path: &Path) -> Result<Job, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path.display().to_string(), e))?;
    job::parse(&text)?.resolve()
}

fn emit(job: &Job, csv: impl FnOnce() -> String, json: impl FnOnce() -> String) -> Result<(), CliError> {
    let text = match job.output.format {
        Format::Csv => csv(),
        Format::Json => json(),
    };
    match &job.output.path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::input("output.path", e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify(family: Option<String>, seed: Option<u64>) -> Result<(), CliError> {
    let seed = match seed {
        Some(s) => s,
        None => job::default_seed()?,
    };
    let cfg = VerifyConfig {
        seed,
        ..VerifyConfig::default()
    };
    let checks = match family {
        Some(id) => {
            let fam = lookup(&id, &FamilyOptions::default()).map_err(|e| CliError::input("--family", e))?;
            verify_family(fam.as_ref(), &cfg)
        }
        None => verify_all(&cfg),
    };
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "{status}  {:<18} {:<30} worst {:<14} tol {}",
            c.family,
            c.name,
            render::sig(c.worst),
            render::sig(c.tolerance)
        );
        if !c.passed {
            println!("      {}", c.detail);
        }
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::verification(format!(
            "{failed} of {} checks failed",
            checks.len()
        )))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compute { job } => {
            let job = load(&job)?;
            if job.pairs.is_empty() {
                return Err(CliError::input(
                    "densities",
                    "compute needs at least two densities or explicit pairs",
                ));
            }
            let results = eval::compute(&job)?;
            emit(
                &job,
                || render::compute_csv(&job, &results),
                || render::compute_json(&job, &results),
            )
        }
        Command::Matrix { job } => {
            let job = load(&job)?;
            let grids = eval::matrix(&job)?;
            emit(
                &job,
                || render::matrix_csv(&job, &grids),
                || render::matrix_json(&job, &grids),
            )
        }
        Command::Verify { family, seed } => verify(family, seed),
        Command::ListFamilies => {
            for e in catalog() {
                println!("{:<20} {}", e.id, e.summary);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
