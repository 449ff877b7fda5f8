//! Scenario files, experiment presets, trace output formats and the sweep
//! runner behind the `stonewalk` binary.

pub mod output;
pub mod schema;
pub mod sweep;

use std::path::Path;

use thiserror::Error;

use schema::ScenarioFile;
use stonewalk_core::sim::{run_closed_loop, SimTrace};

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, unparsable or invalid configuration (exit code 2).
    #[error("configuration error: {0}")]
    Config(String),
    /// Filesystem failure writing results (exit code 3).
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

/// Loads a scenario from a file path or a preset name (`a`, `b`, `c`,
/// optionally prefixed with `scenario-`). A readable file wins over a preset
/// of the same name.
pub fn load_scenario(spec: &str) -> Result<ScenarioFile, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {spec}: {e}")))?;
        return schema::parse_scenario(&text);
    }
    if let Some(preset) = schema::preset_by_name(spec) {
        return Ok(preset);
    }
    Err(CliError::Config(format!(
        "{spec} is neither a readable file nor a preset (a, b, c)"
    )))
}

/// Executes one resolved scenario.
pub fn execute(file: &ScenarioFile) -> Result<SimTrace, CliError> {
    let (scenario, sim, params, planner) = file.resolve()?;
    run_closed_loop(&scenario, &sim, &params, &planner)
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Runs a scenario and writes `trace.csv`, `events.csv` and `summary.json`
/// into `out_dir`.
pub fn run_to_dir(file: &ScenarioFile, out_dir: &Path) -> Result<SimTrace, CliError> {
    let trace = execute(file)?;
    output::write_run_outputs(file, &trace, out_dir)?;
    Ok(trace)
}
