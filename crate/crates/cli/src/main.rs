mod construct;
mod io;
mod report;
mod settings;
mod zoo;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use csym_core::json::ConjugationJson;
use csym_core::{csym_residual, decide_with, Status};

use crate::io::{read_input, InputFile};
use crate::report::{CheckReport, VerifyReport};
use crate::settings::{GlobalOpts, Settings};

pub const EXIT_CSO: u8 = 0;
pub const EXIT_NOT_CSO: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;
pub const EXIT_VERIFICATION_FAILED: u8 = 3;
pub const EXIT_INPUT: u8 = 64;
pub const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(name = "csym", version, about = "Decide and certify complex symmetry of square matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Subcommand)]
enum Command {
    /// Run the decision pipeline on a matrix file.
    Check { file: PathBuf },
    /// Build an operator of a known class together with its conjugation.
    Construct {
        #[arg(value_enum)]
        class: construct::Class,
        /// Parameters as a JSON file path or an inline JSON object.
        #[arg(long)]
        params: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample random operators of one kind and decide each.
    Zoo {
        /// binormal, two_by_two, normal, degree2, partial_isometry(dim[,rank]) or nilpotent3(a,b)
        kind: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        size: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a conjugation file against a matrix file.
    Verify { matrix: PathBuf, conjugation: PathBuf },
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Internal(String),
    VerificationFailed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
            CliError::VerificationFailed(_) => EXIT_VERIFICATION_FAILED,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) | CliError::VerificationFailed(m) => m,
        }
    }
}

impl From<csym_core::Error> for CliError {
    fn from(e: csym_core::Error) -> Self {
        use csym_core::Error as E;
        match e {
            E::EigensolverFailure | E::RankDeterminationUnstable { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub fn status_code(s: Status) -> u8 {
    match s {
        Status::Cso => EXIT_CSO,
        Status::NotCso => EXIT_NOT_CSO,
        Status::Unknown => EXIT_UNKNOWN,
    }
}

fn check(file: &PathBuf, settings: &Settings) -> Result<u8, CliError> {
    let input = read_input(file)?;
    let t = input.matrix()?;
    let start = Instant::now();
    let decision = decide_with(&t, &settings.options)?;
    let total = start.elapsed();
    let report = CheckReport::new(&input, t.nrows(), &decision, settings, total);
    settings.emit(&report, || report.text())?;
    Ok(status_code(decision.verdict.status))
}

fn verify(matrix: &PathBuf, conjugation: &PathBuf, settings: &Settings) -> Result<u8, CliError> {
    let m: InputFile = read_input(matrix)?;
    let t = m.matrix()?;
    let c: InputFile = read_input(conjugation)?;
    let cj: ConjugationJson = c.parse()?;
    let conj = cj.to_conjugation(&settings.options.tol)?;
    let residual = csym_residual(&t, &conj)?;
    let report = VerifyReport::new(&m, &c, &conj, residual, settings);
    settings.emit(&report, || report.text())?;
    Ok(if report.certified { EXIT_CSO } else { EXIT_UNKNOWN })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let settings = Settings::resolve(&cli.opts)?;
    match &cli.command {
        Command::Check { file } => check(file, &settings),
        Command::Construct { class, params, out } => construct::run(*class, params, out, &settings),
        Command::Zoo { kind, count, size, out } => zoo::run(kind, *count, *size, out, &settings),
        Command::Verify { matrix, conjugation } => verify(matrix, conjugation, &settings),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_CSO });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
