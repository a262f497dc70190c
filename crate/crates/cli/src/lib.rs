//! Experiment driver: `aperlab <command> --config <file.json> --out <dir>`.
//!
//! Each command reads its own section of the config (`scan`, `recur`, ...)
//! plus the shared `function`, `relation` and `metric` entries, writes
//! `<command>.csv` (and `<command>_<part>.csv` for secondary tables) and a
//! `<command>.json` summary, and maps the verdict to the exit status.

use std::fmt::Display;
use std::path::Path;

use thiserror::Error;

pub mod commands;
pub mod config;
pub mod report;

pub use config::Config;
pub use report::Report;

/// Diagnostic with the config field it refers to.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("{path}: {message}")]
pub struct CliError {
    pub path: String,
    pub message: String,
}

impl CliError {
    pub fn invalid(path: &str, message: impl Display) -> Self {
        CliError {
            path: path.to_string(),
            message: message.to_string(),
        }
    }

    pub fn core(path: &str, e: aperlab::Error) -> Self {
        CliError::invalid(path, e)
    }
}

pub type Runner = fn(&Config, &mut config::Ctx) -> Result<(bool, serde_json::Map<String, serde_json::Value>, Vec<report::Table>), CliError>;

/// Command name, the config section it reads, and its runner.
pub const COMMANDS: &[(&str, Runner)] = &[
    ("eval", commands::eval),
    ("scan", commands::scan),
    ("recur", commands::recur),
    ("type1", commands::type1),
    ("group", commands::group),
    ("normal", commands::normal),
    ("approx", commands::approx),
    ("conv", commands::conv),
    ("pde", commands::pde),
    ("witness", commands::witness),
];

/// Runs one command on a parsed config.
pub fn execute(command: &str, cfg: &Config) -> Result<Report, CliError> {
    let runner = COMMANDS
        .iter()
        .find(|(name, _)| *name == command)
        .map(|(_, r)| *r)
        .ok_or_else(|| CliError::invalid("command", format!("unknown command {command:?}")))?;
    if let Some(c) = &cfg.command {
        if c != command {
            return Err(CliError::invalid(
                "command",
                format!("config is for {c:?}, invoked as {command:?}"),
            ));
        }
    }
    let mut ctx = config::Ctx::default();
    ctx.ops.insert("run");
    let (pass, result, tables) = runner(cfg, &mut ctx)?;
    Ok(Report {
        command: command.to_string(),
        pass,
        result,
        tables,
        operations: ctx.ops.into_iter().collect(),
    })
}

/// Parses `config_text`, runs `command` on at most `threads` workers and
/// writes the report into `out`.
pub fn run(command: &str, config_text: &str, out: &Path, threads: Option<usize>) -> Result<Report, CliError> {
    let cfg = Config::parse(config_text)?;
    let report = match threads {
        Some(0) => return Err(CliError::invalid("--threads", "must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::invalid("--threads", e))?
            .install(|| execute(command, &cfg))?,
        None => execute(command, &cfg)?,
    };
    report
        .write(out)
        .map_err(|e| CliError::invalid("--out", e))?;
    Ok(report)
}
