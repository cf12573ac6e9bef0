mod args;
mod commands;
mod input;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Format};
use rankone::Exec;

/// Exit status of a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Unresolved,
    Violation,
}

impl Verdict {
    fn code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Violation => 1,
            Verdict::Unresolved => 2,
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(rankone::Error),
    Io(io::Error),
}

impl From<rankone::Error> for Failure {
    fn from(e: rankone::Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

/// Settings shared by every subcommand.
pub struct RunConfig {
    pub format: Format,
    pub verbose: bool,
    pub cap: u128,
    pub seed: u64,
    pub exec: Exec,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    match run(cli) {
        Ok(verdict) => ExitCode::from(verdict.code()),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(64)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Verdict, Failure> {
    let g = cli.global;
    if g.cap == 0 {
        return Err(Failure::Usage("--cap must be positive".into()));
    }
    let cfg = RunConfig {
        format: g.format,
        verbose: g.verbose,
        cap: g.cap,
        seed: g.seed,
        exec: if g.sequential { Exec::Sequential } else { Exec::Parallel },
    };
    let mut out: Box<dyn Write> = if g.output == "-" {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        let file = File::create(&g.output).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", g.output)))?;
        Box::new(BufWriter::new(file))
    };
    let verdict = commands::dispatch(cli.command, &cfg, &mut out)?;
    out.flush()?;
    Ok(verdict)
}
