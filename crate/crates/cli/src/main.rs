//! `drinfeld` command-line tool.
//!
//! Exit status: 0 success, 2 precondition violation, 3 parse or usage error, 1 anything else.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use commands::Verb;

#[derive(Parser, Debug)]
#[command(name = "drinfeld", version, about = "Exact experiments with Drinfeld modules over F_q(t)")]
pub struct Cli {
    /// JSON experiment config; explicit flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output path; `-` writes to standard output.
    #[arg(long, global = true, default_value = "-")]
    out: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized subroutines (polynomial factorization).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Precondition(String),
    Parse(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Precondition(_) => 2,
            Failure::Parse(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Precondition(m) | Failure::Parse(m) | Failure::Other(m) => m,
        }
    }
}

impl From<drinfeld::Error> for Failure {
    fn from(e: drinfeld::Error) -> Self {
        use drinfeld::Error as E;
        match e {
            E::Parse(_) | E::InvalidField(_) | E::InvalidModule(_) => Failure::Parse(e.to_string()),
            e if e.is_precondition() => Failure::Precondition(e.to_string()),
            e => Failure::Other(e.to_string()),
        }
    }
}

fn run() -> Result<(), Failure> {
    let argv = config::expand_argv(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            let text = e.to_string();
            let text = text.strip_prefix("error: ").unwrap_or(&text);
            return Err(Failure::Parse(text.trim_end().to_string()));
        }
    };
    if let Some(seed) = cli.seed {
        drinfeld::field::set_split_seed(seed);
    }
    if let Some(dir) = std::env::var_os("DRINFELD_CACHE").filter(|d| !d.is_empty()) {
        drinfeld::places::set_factor_cache_dir(Some(PathBuf::from(dir)));
    }
    let report = commands::run(&cli.verb)?;
    let text = report.render(cli.format)?;
    if cli.out == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(&cli.out, text).map_err(|e| Failure::Other(format!("writing {}: {e}", cli.out)))
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
