//! Command-line front end for `brine-core`.
//!
//! Every command resolves its settings (flags over a JSON config file over
//! defaults), writes its outputs to the output directory together with a
//! [`RunManifest`], and prints its main document to stdout.

use std::fs;
use std::path::PathBuf;

pub mod cli;
pub mod commands;
pub mod formats;
pub mod manifest;
pub mod settings;

pub use cli::Cli;
pub use manifest::RunManifest;

use manifest::{sha256_hex, MANIFEST_FILE};
use settings::Settings;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    /// A validation suite ran and at least one check failed, or IO failed.
    pub const FAILURE: u8 = 1;
    pub const INVALID: u8 = 2;
    pub const NON_UNIQUE: u8 = 3;
    pub const INFEASIBLE: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] brine_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("format: {0}")]
    Format(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use brine_core::Error as E;
        match self {
            CliError::Core(E::NonUnique { .. }) => exit::NON_UNIQUE,
            CliError::Core(E::Infeasible { .. }) => exit::INFEASIBLE,
            CliError::Core(_) | CliError::Config(_) => exit::INVALID,
            CliError::Io { .. } | CliError::Format(_) => exit::FAILURE,
        }
    }

    /// Machine-readable description of the failure.
    pub fn payload(&self) -> serde_json::Value {
        use brine_core::Error as E;
        let kind = match self {
            CliError::Core(E::NonUnique { .. }) => "non_unique",
            CliError::Core(E::Infeasible { .. }) => "infeasible",
            CliError::Core(E::NoCoexistence) => "no_coexistence",
            CliError::Core(_) | CliError::Config(_) => "invalid",
            CliError::Io { .. } => "io",
            CliError::Format(_) => "format",
        };
        let mut v = serde_json::json!({ "error": kind, "message": self.to_string() });
        match self {
            CliError::Core(E::NonUnique { m_star }) => {
                v["m_star"] = (*m_star).into();
                v["minimizers"] = serde_json::json!([-m_star, m_star]);
            }
            CliError::Core(E::Infeasible { m, c }) => {
                v["m"] = (*m).into();
                v["c"] = (*c).into();
            }
            CliError::Core(E::InvalidParam { field, .. }) => v["field"] = (*field).into(),
            _ => {}
        }
        v
    }
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Output {
    /// Printed to stdout.
    pub stdout: String,
    /// Files written to the output directory, by name.
    pub files: Vec<(String, Vec<u8>)>,
    pub seeds: Vec<u64>,
    /// Set by `validate` when a check failed; outputs are still written.
    pub failed: bool,
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let mut settings = Settings::load(cli.config.as_deref())?;
    let (name, output) = commands::dispatch(&cli.command, &mut settings)?;
    write_outputs(cli, name, &settings, &output)?;
    print!("{}", output.stdout);
    Ok(if output.failed {
        exit::FAILURE
    } else {
        exit::SUCCESS
    })
}

fn write_outputs(
    cli: &Cli,
    command: &str,
    settings: &Settings,
    output: &Output,
) -> Result<(), CliError> {
    let dir = &cli.out_dir;
    let io = |path: PathBuf| move |source| CliError::Io { path, source };
    fs::create_dir_all(dir).map_err(io(dir.clone()))?;
    let mut outputs = std::collections::BTreeMap::new();
    for (name, bytes) in &output.files {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(io(path.clone()))?;
        outputs.insert(name.clone(), sha256_hex(bytes));
    }
    let manifest = RunManifest {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: settings.resolved().clone(),
        seeds: output.seeds.clone(),
        inputs: settings.inputs().clone(),
        outputs,
    };
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, formats::json(&manifest)?).map_err(io(path.clone()))?;
    Ok(())
}

/// Caps the global thread pool from `BRINE_THREADS`.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("BRINE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::Config(format!(
                "BRINE_THREADS must be a positive integer, got \"{value}\""
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}
