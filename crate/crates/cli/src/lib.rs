//! Command-line front end: argument parsing, document formats and the
//! subcommand implementations. `main.rs` only wires stdin/stdout.

pub mod commands;
pub mod document;

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hessenberg_core::inverse::DEFAULT_TOL;
use hessenberg_core::Mode;

use commands::{CliError, Distribution, Outcome, Target, VerifyModeArg};
use document::{parse_stream, Format, MatrixDocument};

#[derive(Debug, Parser)]
#[command(name = "hessenberg", version, about = "Build, check and invert Hessenberg unitary matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the matrix for parameters z_1..z_{n-1}.
    Gen {
        n: usize,
        /// Parameters in [0, 1]: integers, p/q, or decimals.
        z: Vec<String>,
        /// Read whitespace-separated parameters from a file instead.
        #[arg(long, conflicts_with = "z")]
        z_file: Option<PathBuf>,
        /// Defaults to exact when every parameter is rational.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check unitarity of matrices read from FILE (or stdin).
    Verify {
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "float")]
        mode: VerifyModeArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Dimension for --mode symbolic.
        #[arg(long)]
        n: Option<usize>,
        /// Input format; sniffed when omitted.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Recover parameters and the sign transform from matrices in FILE (or stdin).
    Recover {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Find parameters whose matrix has a prescribed first row or last column.
    Synth(SynthArgs),
    /// Emit all 2^{n-1} matrices with parameters in {0, 1}.
    Enumerate {
        n: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Emit seeded random float matrices.
    Sample {
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "uniform")]
        dist: Distribution,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "target")]
pub struct SynthTarget {
    #[arg(long, num_args = 2..)]
    first_row: Option<Vec<String>>,
    #[arg(long, num_args = 2..)]
    last_column: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    target: SynthTarget,
    /// The values are squared magnitudes rather than entries.
    #[arg(long)]
    squares: bool,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn read_source(file: Option<&PathBuf>, stdin: &mut dyn Read) -> Result<String, CliError> {
    let mut s = String::new();
    match file {
        Some(p) if p.as_os_str() != "-" => {
            s = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
        }
        _ => {
            stdin
                .read_to_string(&mut s)
                .map_err(|e| CliError::Usage(format!("stdin: {e}")))?;
        }
    }
    Ok(s)
}

fn read_docs(
    file: Option<&PathBuf>,
    format: Option<Format>,
    stdin: &mut dyn Read,
) -> Result<Vec<MatrixDocument>, CliError> {
    let text = read_source(file, stdin)?;
    let docs = parse_stream(&text, format).map_err(|e| CliError::Usage(e.to_string()))?;
    if docs.is_empty() {
        return Err(CliError::Usage("no matrices in input".into()));
    }
    Ok(docs)
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--tol must be finite and nonnegative, got {tol}")))
    }
}

/// Runs a parsed command against the given stdin.
pub fn execute(cli: Cli, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Gen { n, z, z_file, mode, format } => {
            let tokens = match z_file {
                Some(p) => read_source(Some(&p), stdin)?
                    .split_whitespace()
                    .map(str::to_string)
                    .collect(),
                None => z,
            };
            commands::gen(n, &tokens, mode.map(Mode::from), format)
        }
        Command::Verify { file, mode, tol, n, format } => {
            check_tol(tol)?;
            if mode == VerifyModeArg::Symbolic {
                let n = n.ok_or_else(|| CliError::Usage("--mode symbolic needs --n".into()))?;
                commands::verify_symbolic_cmd(n)
            } else {
                let docs = read_docs(file.as_ref(), format, stdin)?;
                commands::verify_docs(&docs, mode, tol)
            }
        }
        Command::Recover { file, tol, format } => {
            check_tol(tol)?;
            let docs = read_docs(file.as_ref(), format, stdin)?;
            commands::recover_docs(&docs, tol)
        }
        Command::Synth(a) => {
            check_tol(a.tol)?;
            let (target, tokens) = match (a.target.first_row, a.target.last_column) {
                (Some(v), None) => (Target::FirstRow, v),
                (None, Some(v)) => (Target::LastColumn, v),
                _ => unreachable!("clap enforces exactly one target"),
            };
            commands::synth(target, &tokens, a.squares, a.mode.map(Mode::from), a.tol, a.format)
        }
        Command::Enumerate { n, format } => commands::enumerate(n, format),
        Command::Sample { n, count, seed, dist, format } => commands::sample(n, count, seed, dist, format),
    }
}
