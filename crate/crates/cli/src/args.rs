use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use serde::Serialize;
use vicar_core::harness::{self, ExperimentSpec, FULL_SCALE_RUNS};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "vicar",
    version,
    about = "Monte Carlo experiments on vicarious learning in multi-armed bandits",
    after_help = "Presets: fig2 fig3a fig3b fig3c fig4 fig_inspiration fig_imitation fig_m fig_spike fig_T \
                  appA appB appC appD appE appF appF_er appF_lattice appG"
)]
pub struct Args {
    /// Named experiment to run.
    #[arg(long, value_name = "NAME", conflicts_with = "config", required_unless_present = "config")]
    pub preset: Option<String>,

    /// Experiment file: TOML, or JSON (a spec or a previous manifest).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Runs per cell [default: 10000].
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: Option<u64>,

    /// Master seed [default: 42, or the config's].
    #[arg(long, value_name = "S")]
    pub seed: Option<u64>,

    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "results")]
    pub out: PathBuf,

    /// Format of the metric table.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Worker threads; 0 uses every core.
    #[arg(long, value_name = "N", env = "VICAR_WORKERS", default_value_t = 0)]
    pub workers: usize,

    /// Common random numbers: reuse run seeds across modes.
    #[arg(long)]
    pub crn: bool,

    /// Use 100000 runs per cell.
    #[arg(long, conflicts_with = "runs")]
    pub full_scale: bool,
}

pub(crate) enum Parsed {
    /// Help or version was printed.
    Exit(u8),
    Error(CliError),
}

impl Args {
    pub(crate) fn parse_from_argv<I, T>(argv: I) -> Result<Self, Parsed>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        Self::try_parse_from(argv).map_err(|e| match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                let _ = e.print();
                Parsed::Exit(0)
            }
            ErrorKind::ArgumentConflict => Parsed::Error(CliError::Conflict(trim(e.to_string()))),
            _ => Parsed::Error(CliError::Usage(trim(e.to_string()))),
        })
    }

    /// The experiment after applying command-line overrides.
    pub fn spec(&self) -> Result<ExperimentSpec, CliError> {
        let mut spec = match (&self.preset, &self.config) {
            (Some(name), None) => {
                harness::preset(name).ok_or_else(|| CliError::UnknownPreset(name.clone()))?
            }
            (None, Some(path)) => crate::load_config(path)?,
            _ => return Err(CliError::Conflict("give exactly one of --preset and --config".into())),
        };
        if self.full_scale {
            spec.runs = FULL_SCALE_RUNS;
        } else if let Some(n) = self.runs {
            spec.runs = n as usize;
        }
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        spec.crn |= self.crn;
        Ok(spec)
    }

    /// Where the experiment came from, for messages.
    pub fn source(&self) -> String {
        match (&self.preset, &self.config) {
            (Some(name), _) => format!("preset {name}"),
            (_, Some(path)) => path.display().to_string(),
            _ => String::new(),
        }
    }
}

fn trim(s: String) -> String {
    s.trim_start_matches("error: ").trim_end().to_string()
}
