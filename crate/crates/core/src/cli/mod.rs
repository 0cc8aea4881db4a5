//! Command-line front end.
//!
//! Every command can be driven by flags, by a JSON config file, or both; flags
//! win over config keys. Parameters are validated in full before any work starts
//! and outputs are written atomically, so a failed run leaves no new files behind.

mod args;
mod jobs;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::numerics::SeedSpec;
use crate::{Error, Result};

pub use args::{CheckArgs, ConvergeArgs, DensityArgs, FiguresArgs, SimulateArgs, SolveArgs};
pub use jobs::Job;

/// Output directory used when neither `--out` nor the config names one.
pub const DEFAULT_OUT: &str = "out";

pub const COMMANDS: [&str; 6] = ["density", "solve", "converge", "check", "simulate", "figures"];

/// Parsed JSON config. `params` keys mirror the per-command flags in snake_case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub stream: Option<u32>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub params: Map<String, Value>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn seed_spec(&self) -> SeedSpec {
        SeedSpec::new(self.seed.unwrap_or(0), self.stream.unwrap_or(0))
    }

    pub fn out_dir(&self) -> &Path {
        self.out.as_deref().unwrap_or(Path::new(DEFAULT_OUT))
    }
}

/// Result of checking a config without running it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub command: Option<String>,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every violated precondition of a config text.
pub fn validate(text: &str) -> ValidationReport {
    match RunConfig::from_json(text) {
        Ok(cfg) => validate_config(&cfg),
        Err(e) => ValidationReport { command: None, violations: vec![e.to_string()] },
    }
}

pub fn validate_config(cfg: &RunConfig) -> ValidationReport {
    let violations = match jobs::plan(cfg) {
        Ok(_) => Vec::new(),
        Err(v) => v,
    };
    ValidationReport { command: Some(cfg.command.clone()), violations }
}

/// Validates, runs and writes the outputs of one config. Returns the written paths.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let job = jobs::plan(cfg).map_err(|v| Error::Config(v.join("; ")))?;
    let tables = job.execute(cfg.seed_spec())?;
    crate::report::write_tables_atomic(cfg.out_dir(), &tables)
}

/// Maps an error to the process exit status: 1 for numerical failures, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        1
    } else {
        2
    }
}

/// Worker cap from `NLCLT_THREADS` (unset or 0 = automatic).
pub fn threads_from_env() -> Result<usize> {
    match std::env::var("NLCLT_THREADS") {
        Ok(s) if !s.trim().is_empty() => s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("NLCLT_THREADS must be a non-negative integer, got `{s}`"))),
        _ => Ok(0),
    }
}

pub(crate) fn read_config_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

/// Entry point shared by the binary and the tests. Returns the exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    let outcome = (|| -> Result<i32> {
        if let Some(args::Cmd::Validate { path }) = &cli.command {
            let path = path.as_ref().or(cli.config.as_ref()).ok_or_else(|| {
                Error::Config("validate needs a config path (positional or --config)".into())
            })?;
            let report = validate(&read_config_text(path)?);
            println!("{}", serde_json::to_string_pretty(&report).unwrap_or_default());
            return Ok(if report.is_valid() { 0 } else { 2 });
        }
        let cfg = cli.resolve()?;
        let threads = threads_from_env()?;
        let written = crate::parallel::with_threads(threads, || run(&cfg))?;
        for p in written {
            println!("{}", p.display());
        }
        Ok(0)
    })();
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("nlclt: {e}");
            exit_code(&e)
        }
    }
}
