//! `liesym`: generator catalogs, bracket tables, algebra structure,
//! conservation laws and the verification suite for the heat equation.
//!
//! Exit codes: 0 when every requested check passes, 1 on a check failure,
//! 2 on a usage error, 3 on an I/O error.

mod commands;
mod config;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CommonArgs, Format, RunConfig};

#[derive(Parser)]
#[command(name = "liesym", version, about = "Lie symmetries and conservation laws of the heat equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// generator catalog
    Gen,
    /// commutator tables with the printed-table comparison
    Brackets,
    /// closure, derived series and canonical matches
    Algebra,
    /// conserved vectors with the printed-law comparison
    Conserve,
    /// symbolic and numeric verification suite
    Verify,
    /// catalog sizes for a range of n
    Count,
}

/// Why a run stopped early.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<liesym::Error> for Failure {
    fn from(e: liesym::Error) -> Self {
        use liesym::Error::*;
        match e {
            Io(e) => Failure::Io(e.to_string()),
            InvalidArgument(_) | DimensionMismatch(_) | Unsupported(_) | MaxJetOrder { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Check(other.to_string()),
        }
    }
}

fn render(out: &commands::Outcome, format: Format) -> Result<String, Failure> {
    Ok(match format {
        Format::Text => out.text.clone(),
        Format::Latex => out.latex.clone(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out.json).map_err(|e| Failure::Check(e.to_string()))?;
            s.push('\n');
            s
        }
    })
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let cfg = RunConfig::from_args(cli.common).map_err(Failure::Usage)?;
    let out = match cli.command {
        Command::Gen => commands::gen(&cfg)?,
        Command::Brackets => commands::brackets(&cfg)?,
        Command::Algebra => commands::algebra(&cfg)?,
        Command::Conserve => commands::conserve(&cfg)?,
        Command::Verify => verify::verify(&cfg)?,
        Command::Count => commands::count(cfg.dims)?,
    };
    let body = render(&out, cfg.format)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(e.to_string()))?;
        }
    }
    Ok(out.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("liesym: some checks failed");
            ExitCode::from(1)
        }
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) => format!("usage error: {m}"),
                Failure::Check(m) => format!("check failed: {m}"),
                Failure::Io(m) => format!("i/o error: {m}"),
            };
            eprintln!("liesym: {msg}");
            ExitCode::from(f.code())
        }
    }
}
