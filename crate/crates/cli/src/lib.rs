//! Command-line front end: configuration, subcommand dispatch and report
//! emission.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::fs;

use serde_json::Map;

pub use config::{parse_range, BaseChoice, RunConfig};
pub use error::{CliError, Result};
pub use report::{ReportEnvelope, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Volume,
    Spectrum,
    Weyl,
    Audit,
    Pohozaev,
    Bdgg,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Volume => "volume",
            Command::Spectrum => "spectrum",
            Command::Weyl => "weyl",
            Command::Audit => "audit",
            Command::Pohozaev => "pohozaev",
            Command::Bdgg => "bdgg",
            Command::All => "all",
        }
    }

    fn parts(self) -> Vec<Command> {
        match self {
            Command::All => vec![
                Command::Volume,
                Command::Spectrum,
                Command::Weyl,
                Command::Audit,
                Command::Pohozaev,
                Command::Bdgg,
            ],
            c => vec![c],
        }
    }
}

/// Exit status: all verdicts passed.
pub const EXIT_OK: i32 = 0;
/// Exit status: execution error.
pub const EXIT_ERROR: i32 = 1;
/// Exit status: at least one verdict failed.
pub const EXIT_VERDICT_FAIL: i32 = 2;

/// Runs `command`, writes `<out>/report.json` and the CSV tables, and
/// returns the envelope.
pub fn run(command: Command, cfg: &RunConfig) -> Result<ReportEnvelope> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out)?;
    let mut payload = Map::new();
    let mut verdicts = Vec::new();
    for part in command.parts() {
        let section = match part {
            Command::Volume => commands::volume(cfg)?,
            Command::Spectrum => commands::spectrum(cfg)?,
            Command::Weyl => commands::weyl(cfg)?,
            Command::Audit => commands::audit(cfg)?,
            Command::Pohozaev => commands::pohozaev(cfg)?,
            Command::Bdgg => commands::bdgg(cfg)?,
            Command::All => unreachable!("expanded above"),
        };
        for t in &section.tables {
            t.write(&cfg.out)?;
        }
        payload.insert(part.name().to_string(), section.payload);
        verdicts.extend(section.verdicts);
    }
    let envelope = ReportEnvelope {
        tool: "minlap".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.name().into(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        config: cfg.clone(),
        payload,
        verdicts,
    };
    fs::write(
        cfg.out.join("report.json"),
        serde_json::to_string_pretty(&envelope)?,
    )?;
    Ok(envelope)
}

pub fn exit_code(outcome: &Result<ReportEnvelope>) -> i32 {
    match outcome {
        Ok(env) if env.all_passed() => EXIT_OK,
        Ok(_) => EXIT_VERDICT_FAIL,
        Err(_) => EXIT_ERROR,
    }
}
