//! `effforms`: classify and inspect effective forms from JSON documents.
//!
//! Exit codes: 0 success, 1 I/O, parse or invalid input, 2 form not effective,
//! 3 not equivalent or no witness found.

mod commands;
mod document;
mod error;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{run_pair, run_single, Outcome, Settings, Single};
use error::Result;

#[derive(Parser, Debug)]
#[command(name = "effforms", version, about = "Symplectic classification of effective 3-forms on R^6")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized steps (witness search, splitting directions).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Restarts for the numerical witness search.
    #[arg(long, global = true, default_value_t = 16)]
    restarts: usize,
    /// Residual accepted for a numerical witness; also the relative tolerance
    /// for comparing float orbit parameters.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orbit, q invariants, stabilizer, prolongation and PDE of a 3-form on R^6.
    Classify {
        file: PathBuf,
        /// Also compute a symplectic map to the orbit representative.
        #[arg(long)]
        witness: bool,
    },
    /// Stabilizer subalgebra in sp(dim) and its Killing signature.
    Stabilizer { file: PathBuf },
    /// Dimension of the first prolongation of the stabilizer.
    Prolong { file: PathBuf },
    /// Pfaffian and type of a 2-form on R^4.
    Pfaffian { file: PathBuf },
    /// Effectiveness test and effective decomposition.
    Effective { file: PathBuf },
    /// Monge-Ampere equation of a 3-form; checks the jet conditions when a jet is given.
    Mae { file: PathBuf },
    /// Decide whether two 3-forms lie in the same orbit.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        /// Require a converged numerical map from `b` to `a`.
        #[arg(long)]
        witness: bool,
    },
    /// Find a symplectic map to `target`, or to the orbit representative.
    Witness { file: PathBuf, target: Option<PathBuf> },
}

fn run(cli: &Cli) -> Result<Outcome> {
    let mut settings = Settings {
        seed: cli.seed,
        restarts: cli.restarts,
        tolerance: cli.tolerance,
        witness: false,
    };
    let single = |cmd: Single, file: &PathBuf, settings: &Settings| {
        let doc = document::load(file)?;
        run_single(cmd, &doc, settings)
    };
    match &cli.command {
        Command::Classify { file, witness } => {
            settings.witness = *witness;
            single(Single::Classify, file, &settings)
        }
        Command::Stabilizer { file } => single(Single::Stabilizer, file, &settings),
        Command::Prolong { file } => single(Single::Prolong, file, &settings),
        Command::Pfaffian { file } => single(Single::Pfaffian, file, &settings),
        Command::Effective { file } => single(Single::Effective, file, &settings),
        Command::Mae { file } => single(Single::Mae, file, &settings),
        Command::Equiv { a, b, witness } => {
            settings.witness = *witness;
            run_pair("equiv", &document::load(a)?, &document::load(b)?, &settings)
        }
        Command::Witness { file, target: None } => single(Single::Witness, file, &settings),
        Command::Witness {
            file,
            target: Some(target),
        } => {
            settings.witness = true;
            run_pair("witness", &document::load(file)?, &document::load(target)?, &settings)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let text = if cli.json {
                outcome.report.to_json() + "\n"
            } else {
                outcome.report.to_text()
            };
            // A closed pipe downstream is not an error for a report printer.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            match outcome.failure {
                None => ExitCode::SUCCESS,
                Some(e) => {
                    eprintln!("effforms: {e}");
                    ExitCode::from(e.exit_code())
                }
            }
        }
        Err(e) => {
            eprintln!("effforms: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
