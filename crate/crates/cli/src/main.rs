//! `mapsolve`: solve, audit and decompose multi-unit assignment instances.
//!
//! Exit codes: 0 success, 2 input error, 3 cap refusal or unsolved search,
//! 4 equilibrium verification failure, 5 property violation.

mod commands;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use mapsolve::{Error, Instance};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Parser, Debug)]
#[command(name = "mapsolve", version, about = "Exact assignment of multi-unit objects under approve/reject preferences")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel searches (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Utilities (and an assignment where one is defined) of a solution.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Comma-separated agent ids, highest priority first.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
    },
    /// Competitive equilibrium with equal incomes.
    Cce {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        action: CceAction,
        /// Assignment (and prices) to verify.
        #[arg(long)]
        equilibrium: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ScopeArg::All)]
        scope: ScopeArg,
    },
    /// Check a property of a solution.
    Audit {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        property: Property,
        #[arg(long, value_enum)]
        solution: SolutionArg,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
        #[arg(long)]
        max_coalition: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Acceptors of the added perfect object (default: every nonempty set).
        #[arg(long, value_delimiter = ',')]
        acceptors: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = NotionArg::Weak)]
        notion: NotionArg,
        #[arg(long, value_enum, default_value_t = ScopeArg::All)]
        scope: ScopeArg,
    },
    /// Lottery over deterministic assignments with the given expectation.
    Decompose {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        ram: PathBuf,
        #[arg(long)]
        sample_seed: Option<u64>,
    },
    /// Seeded random instance.
    Random {
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        objects: usize,
        #[arg(long, default_value = "1/2")]
        density: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Es,
    EsStar,
    Epo,
    Priority,
    Rp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CceAction {
    Find,
    Verify,
    Range,
    IpoSelection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Property {
    Lorenz,
    Envy,
    Ipo,
    Manipulate,
    Nonbossy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolutionArg {
    Es,
    EsStar,
    Epo,
    Cce,
    CceIpoSelection,
    Priority,
    Rp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NotionArg {
    Weak,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    All,
    SymmetricPrices,
}

/// What a command produced.
pub struct Outcome {
    pub instance: Option<Instance>,
    pub result: Value,
    pub table: String,
    pub status: u8,
}

/// A failure with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub status: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) | Error::Validation { .. } | Error::Precondition(_) => 2,
            Error::CapExceeded { .. } | Error::Unsolved(_) => 3,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            status: 2,
            message: message.into(),
        }
    }
}

fn digest(inst: &Instance) -> String {
    sha256(&inst.to_json())
}

pub fn sha256(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Solve { .. } => "solve",
        Command::Cce { .. } => "cce",
        Command::Audit { .. } => "audit",
        Command::Decompose { .. } => "decompose",
        Command::Random { .. } => "random",
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(Failure::input(format!("cannot write output: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global();
    }
    let start = Instant::now();
    let run = commands::run(&cli.command);
    let elapsed = start.elapsed().as_secs_f64();
    let argv: Vec<String> = std::env::args().skip(1).collect();

    let (mut report, table, status) = match run {
        Ok(o) => {
            let mut report = json!({
                "command": command_name(&cli.command),
                "args": argv,
                "result": o.result,
                "status": o.status,
            });
            if let Some(inst) = &o.instance {
                report["instance"] = json!({
                    "digest": digest(inst),
                    "agents": inst.n(),
                    "objects": inst.m(),
                });
            }
            (report, o.table, o.status)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            let report = json!({
                "command": command_name(&cli.command),
                "args": argv,
                "error": f.message,
                "status": f.status,
            });
            let table = format!("error: {}", f.message);
            (report, table, f.status)
        }
    };
    if cli.timing {
        report["timing"] = json!({ "seconds": format!("{elapsed:.4}") });
    }
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes"),
        Format::Table if cli.timing => format!("{table}\ntime: {elapsed:.4}s"),
        Format::Table => table,
    };
    match emit(&cli, &text) {
        Ok(()) => ExitCode::from(status),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}
