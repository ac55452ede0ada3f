use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use polybound_core::{BasisFamily, NodeKind};

mod boxgen;
mod bound;
mod checkmesh;
mod demo;
mod report;

/// Guaranteed bounds on high-order polynomials via optimal bounding boxes.
#[derive(Parser, Debug)]
#[command(name = "polybound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimize a bounding table and write it to a file.
    Boxgen(boxgen::BoxgenArgs),
    /// Bound a polynomial given by a coefficient file.
    Bound(bound::BoundArgs),
    /// Certify the Jacobian determinant of every element of a curved mesh.
    Checkmesh(checkmesh::CheckmeshArgs),
    /// Solid-body rotation with the bounds-preserving limiter.
    LimitDemo(demo::DemoArgs),
    /// Recompute the tabulated boxes and compare them with the shipped copies.
    Tables(report::TablesArgs),
}

/// Basis and table selection shared by several subcommands.
#[derive(Args, Debug, Clone)]
pub struct TableChoice {
    /// Basis family (lobatto, legendre, bernstein, modal).
    #[arg(long, default_value = "lobatto", value_parser = parse_family)]
    pub family: BasisFamily,
    /// Control node distribution.
    #[arg(long, default_value = "optimized", value_parser = parse_kind)]
    pub nodes: NodeKind,
}

fn parse_family(s: &str) -> Result<BasisFamily, String> {
    s.parse().map_err(|e: polybound_core::Error| e.to_string())
}

pub fn parse_kind(s: &str) -> Result<NodeKind, String> {
    s.parse().map_err(|e: polybound_core::Error| e.to_string())
}

pub fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be positive, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

pub fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

/// Failure classes mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, unreadable or malformed files.
    Usage(String),
    /// The computation ran but a validity or verification check failed.
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Check(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Check(m) => f.write_str(m),
        }
    }
}

impl From<polybound_core::Error> for Failure {
    fn from(e: polybound_core::Error) -> Self {
        use polybound_core::Error as E;
        match e {
            E::VerificationFailed(_) | E::NonConvergence { .. } | E::Infeasible => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

pub type CmdResult = Result<(), Failure>;

pub fn read_context(path: &std::path::Path) -> impl Fn(polybound_core::Error) -> Failure + '_ {
    move |e| Failure::Usage(format!("{}: {e}", path.display()))
}

pub fn write_file(path: &PathBuf, text: &str) -> CmdResult {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Boxgen(a) => boxgen::run(&a),
        Command::Bound(a) => bound::run(&a),
        Command::Checkmesh(a) => checkmesh::run(&a),
        Command::LimitDemo(a) => demo::run(&a),
        Command::Tables(a) => report::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
