//! `vicar`: runs experiment presets or custom grids and writes metric tables.

mod args;
mod output;

use std::ffi::OsString;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use thiserror::Error;
use vicar_core::harness::{self, CellOutcome, ExperimentSpec};

pub use args::{Args, Format};
pub use output::{header, read_csv, rows, write_csv, write_json, FailedCell, Manifest, OutputRow, SCHEMA};

/// Failure classes, each with its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("unknown preset `{0}`; available: {list}", list = harness::PRESETS.join(", "))]
    UnknownPreset(String),
    #[error("malformed config {path}: {reason}")]
    Config { path: String, reason: String },
    #[error("{0}")]
    Conflict(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0} cell(s) failed")]
    CellsFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::UnknownPreset(_) => 3,
            Self::Config { .. } => 4,
            Self::Conflict(_) => 5,
            Self::Io { .. } => 6,
            Self::CellsFailed(_) => 7,
        }
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Parses `argv`, runs the experiment and writes the outputs.
pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::parse_from_argv(argv) {
        Ok(a) => a,
        Err(args::Parsed::Exit(code)) => return ExitCode::from(code),
        Err(args::Parsed::Error(e)) => return fail(&e),
    };
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code())
}

/// Runs a parsed invocation end to end.
pub fn execute(args: &Args) -> Result<(), CliError> {
    let spec = args.spec()?;
    let started = Instant::now();
    let total = spec.cells().len();
    let outcomes = harness::execute_with::<f64>(&spec, args.workers, |o| log_cell(o, total))
        .map_err(|e| CliError::Config {
            path: args.source(),
            reason: e.to_string(),
        })?;
    let wall = started.elapsed().as_secs_f64();

    fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    let table = rows(&spec, &outcomes);
    match args.format {
        Format::Csv => write_csv(&args.out.join("metrics.csv"), &table)?,
        Format::Json => write_json(&args.out.join("metrics.json"), &table)?,
    }
    let manifest = Manifest::new(&spec, args, &outcomes, wall);
    manifest.write(&args.out.join("manifest.json"))?;

    let failed = outcomes.iter().filter(|o| o.result.is_err()).count();
    if failed > 0 {
        return Err(CliError::CellsFailed(failed));
    }
    Ok(())
}

fn log_cell(o: &CellOutcome<f64>, total: usize) {
    let c = &o.params;
    let what = format!(
        "{} {} m={} pi_max={} alpha={} eps={} tau={} phi=({}, {}) T={}",
        c.mode, c.topology, c.m, c.pi_max, c.alpha, c.epsilon, c.tau, c.phi_1, c.phi_2, c.horizon
    );
    match &o.result {
        Ok(_) => eprintln!("[{}/{total}] {what}", o.index + 1),
        Err(e) => eprintln!("[{}/{total}] {what}: FAILED: {e}", o.index + 1),
    }
}

/// Reads an experiment from TOML, or from JSON holding either a spec or a
/// manifest written by a previous run.
pub fn load_config(path: &Path) -> Result<ExperimentSpec, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let malformed = |reason: String| CliError::Config {
        path: path.display().to_string(),
        reason,
    };
    let spec: ExperimentSpec = if path.extension().is_some_and(|e| e == "json") {
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
        let inner = value.get("spec").cloned().unwrap_or(value);
        serde_json::from_value(inner).map_err(|e| malformed(e.to_string()))?
    } else {
        toml::from_str(&text).map_err(|e| malformed(e.to_string()))?
    };
    check_cells(&spec).map_err(malformed)?;
    Ok(spec)
}

/// Rejects cells that could never run, naming the offending setting.
fn check_cells(spec: &ExperimentSpec) -> Result<(), String> {
    spec.validate().map_err(|e| e.to_string())?;
    for (i, c) in spec.cells().iter().enumerate() {
        c.system_config::<f64>()
            .map_err(|e| format!("cell {i}: {e}"))?;
        if c.m == 0 {
            return Err(format!("cell {i}: `m` must be at least 1"));
        }
        if !(c.alpha > 0.0 && c.alpha <= c.pi_max) {
            return Err(format!(
                "cell {i}: `alpha` = {} must lie in (0, pi_max = {}]",
                c.alpha, c.pi_max
            ));
        }
        if !(c.epsilon >= 0.0 && c.epsilon.is_finite()) {
            return Err(format!("cell {i}: `epsilon` = {} must be finite and >= 0", c.epsilon));
        }
    }
    Ok(())
}
