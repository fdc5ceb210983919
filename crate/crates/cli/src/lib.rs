//! Batch front end for the unitri laboratory: argument handling, run
//! configurations, record tables and the subcommands themselves.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{run, Outcome};
pub use config::{Command, Format, RunConfig};
pub use error::CliError;
pub use table::{Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "unitri", version, about = "Random walks on unitriangular groups over F_p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Exact total variation and L² distance against t.
    TvCurve(Flags),
    /// Character bound and comparison bound against t.
    BoundCurve(Flags),
    /// Eigenvalues of a transition matrix.
    Spectrum(Flags),
    /// Super-class labels with their statistics.
    Superclasses(Flags),
    /// Words for every class element, verified.
    Words(Flags),
    /// Comparison constant and its spectral check.
    Compare(Flags),
    /// The invariant suite.
    Verify(Flags),
}

impl Sub {
    fn split(&self) -> (Command, &Flags) {
        match self {
            Sub::TvCurve(f) => (Command::TvCurve, f),
            Sub::BoundCurve(f) => (Command::BoundCurve, f),
            Sub::Spectrum(f) => (Command::Spectrum, f),
            Sub::Superclasses(f) => (Command::Superclasses, f),
            Sub::Words(f) => (Command::Words, f),
            Sub::Compare(f) => (Command::Compare, f),
            Sub::Verify(f) => (Command::Verify, f),
        }
    }
}

/// Flags shared by every subcommand. They override the config file.
#[derive(Debug, Args, Default)]
pub struct Flags {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<u32>,
    /// P, Q, K or productQ.
    #[arg(long)]
    pub walk: Option<String>,
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long = "t-max")]
    pub t_max: Option<u64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Flags {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(p) = self.p {
            cfg.p = p;
        }
        if let Some(w) = &self.walk {
            cfg.set("walk", w)?;
        }
        if let Some(t) = self.t {
            cfg.t = Some(t);
        }
        if let Some(t) = self.t_max {
            cfg.t_max = t;
        }
        if let Some(e) = self.eps {
            cfg.eps = Some(e);
        }
        if let Some(f) = &self.format {
            cfg.format = f.parse()?;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if self.exact {
            cfg.exact = true;
        }
        if let Some(j) = self.jobs {
            cfg.jobs = Some(j);
        }
        Ok(())
    }
}

/// Builds the run configuration: config file first, then flags.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let (command, flags) = cli.command.split();
    let mut cfg = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            let mut c = RunConfig::from_text(&text, Some(command))?;
            c.command = command;
            c
        }
        None => RunConfig::new(command),
    };
    flags.apply(&mut cfg)?;
    Ok(cfg)
}

/// Runs `cfg` on a pool of `cfg.jobs` threads and writes the table.
pub fn execute(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} worker threads: {e}", cfg.jobs.unwrap_or(0))))?;
    let outcome = pool.install(|| run(cfg))?;
    let bytes = outcome.table.encode(cfg.format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => stdout.write_all(&bytes)?,
    }
    for note in &outcome.notes {
        writeln!(stderr, "{note}")?;
    }
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(outcome.failures))
    }
}

/// Whole program: returns the process exit code.
pub fn main_with(args: impl IntoIterator<Item = String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let result = resolve(&cli).and_then(|cfg| execute(&cfg, stdout, stderr));
    match result {
        Ok(()) => 0,
        Err(e) => {
            if let CliError::Invariant(list) = &e {
                let _ = writeln!(stderr, "{}", serde_json::json!({ "failures": list }));
            } else {
                let _ = writeln!(stderr, "{e}");
            }
            e.exit_code()
        }
    }
}
