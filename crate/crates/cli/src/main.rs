//! `lattice-forge` command-line front end.

mod hk;
mod input;
mod latt;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lattice_forge::catalog::CATALOG_ENV;

use report::{emit, Format};

#[derive(Parser, Debug)]
#[command(name = "lattice-forge", version, about = "Even lattices, discriminant forms and hyper-Kähler lattice computations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    group: Group,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Coordinate sup-norm bound for vector and embedding searches.
    #[arg(long, global = true, default_value_t = lattice_forge::embed::DEFAULT_HEIGHT)]
    pub height: u32,
    /// Largest determinant scanned by census verbs.
    #[arg(long, global = true)]
    pub max_det: Option<u64>,
    /// Genus-realization catalog, one lattice expression per line.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Group {
    /// Lattice and discriminant-form operations.
    #[command(subcommand)]
    Latt(latt::Cmd),
    /// Hyper-Kähler lattice computations.
    #[command(subcommand)]
    Hk(hk::Cmd),
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl From<lattice_forge::Error> for CliError {
    fn from(e: lattice_forge::Error) -> Self {
        match e {
            lattice_forge::Error::Parse { .. } => CliError::Usage(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(path) = &cli.global.catalog {
        // Set before any worker threads exist.
        std::env::set_var(CATALOG_ENV, path);
    }
    let (mut rep, outcome) = match &cli.group {
        Group::Latt(c) => latt::run(c, &cli.global),
        Group::Hk(c) => hk::run(c, &cli.global),
    };
    let code = match outcome {
        Ok(()) => {
            rep.undetermined = contains_undetermined(&rep.result);
            0
        }
        Err(CliError::Usage(m)) => {
            eprintln!("usage error: {m}");
            rep.diagnostics.push(format!("usage error: {m}"));
            2
        }
        Err(CliError::Domain(m)) => {
            eprintln!("error: {m}");
            rep.diagnostics.push(format!("error: {m}"));
            1
        }
    };
    print!("{}", emit(&rep, cli.global.format));
    ExitCode::from(code)
}

/// Whether any decision in the result is undetermined.
fn contains_undetermined(v: &serde_json::Value) -> bool {
    use serde_json::Value;
    match v {
        Value::Object(m) => {
            m.get("verdict").and_then(Value::as_str) == Some("undetermined")
                || m.get("undetermined").and_then(Value::as_bool) == Some(true)
                || m.values().any(contains_undetermined)
        }
        Value::Array(xs) => xs.iter().any(contains_undetermined),
        _ => false,
    }
}

