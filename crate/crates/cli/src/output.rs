use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use vicar_core::harness::{CellOutcome, CellParams, ExperimentSpec};
use vicar_core::Metric;

use crate::{io_err, Args, CliError, Format};

/// First line of every metric table.
pub const SCHEMA: &str = "# schema: vicar-metrics v1";

/// One (cell, period, metric) observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRow {
    pub preset: String,
    pub mode: String,
    pub topology: String,
    pub m: usize,
    pub pi_max: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub tau: String,
    pub phi_1: f64,
    pub phi_2: f64,
    /// A number, or `tied` when it follows φ₁.
    pub phi_ol: String,
    pub phi_bs: f64,
    pub sharing_mask: String,
    pub sharing_freq: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub period: usize,
    pub metric_name: String,
    pub value: f64,
    pub std_err: f64,
    pub n_runs: usize,
}

impl OutputRow {
    fn cell_key(&self) -> [String; 15] {
        [
            self.preset.clone(),
            self.mode.clone(),
            self.topology.clone(),
            self.m.to_string(),
            self.pi_max.to_string(),
            self.alpha.to_string(),
            self.epsilon.to_string(),
            self.tau.clone(),
            self.phi_1.to_string(),
            self.phi_2.to_string(),
            self.phi_ol.clone(),
            self.phi_bs.to_string(),
            self.sharing_mask.clone(),
            self.sharing_freq.to_string(),
            self.horizon.to_string(),
        ]
    }
}

fn template(preset: &str, c: &CellParams, runs: usize) -> OutputRow {
    let tags = c.variant_tags();
    let preset = if tags.is_empty() {
        preset.to_string()
    } else {
        format!("{preset}[{}]", tags.join(","))
    };
    OutputRow {
        preset,
        mode: c.mode.to_string(),
        topology: c.topology.to_string(),
        m: c.m,
        pi_max: c.pi_max,
        alpha: c.alpha,
        epsilon: c.epsilon,
        tau: c.tau.to_string(),
        phi_1: c.phi_1,
        phi_2: c.phi_2,
        phi_ol: c.phi_ol.map_or_else(|| "tied".into(), |v| v.to_string()),
        phi_bs: c.phi_bs,
        sharing_mask: c.sharing.mask.to_string(),
        sharing_freq: c.sharing.frequency,
        horizon: c.horizon,
        period: 0,
        metric_name: String::new(),
        value: 0.0,
        std_err: 0.0,
        n_runs: runs,
    }
}

/// Flattens completed cells into sorted rows; failed cells contribute none.
pub fn rows(spec: &ExperimentSpec, outcomes: &[CellOutcome<f64>]) -> Vec<OutputRow> {
    let mut out = Vec::new();
    for o in outcomes {
        let Ok(summary) = &o.result else { continue };
        let series = &summary.series;
        let base = template(&spec.name, &o.params, series.runs);
        for metric in Metric::ALL {
            let stat = series.get(metric);
            for t in 0..stat.len() {
                out.push(OutputRow {
                    period: t + 1,
                    metric_name: metric.name().into(),
                    value: stat.mean[t],
                    std_err: stat.std_err[t],
                    ..base.clone()
                });
            }
        }
        if spec.search_scope {
            for (name, (value, std_err)) in [
                ("agent_scope", summary.agent_scope),
                ("system_scope", summary.system_scope),
            ] {
                out.push(OutputRow {
                    period: o.params.horizon,
                    metric_name: name.into(),
                    value,
                    std_err,
                    ..base.clone()
                });
            }
        }
    }
    out.sort_by_cached_key(|r| (r.cell_key(), r.period, r.metric_name.clone()));
    out
}

/// Writes the schema comment, the header and every row.
pub fn write_csv(path: &Path, rows: &[OutputRow]) -> Result<(), CliError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{SCHEMA}").map_err(io_err(path))?;
    let mut csv = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    csv.write_record(header()).map_err(|e| csv_err(path, e))?;
    for row in rows {
        csv.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    csv.flush().map_err(io_err(path))
}

/// Column names in field order.
pub fn header() -> [&'static str; 20] {
    [
        "preset", "mode", "topology", "m", "pi_max", "alpha", "epsilon", "tau", "phi_1", "phi_2",
        "phi_ol", "phi_bs", "sharing_mask", "sharing_freq", "T", "period", "metric_name", "value",
        "std_err", "n_runs",
    ]
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source: e.into(),
    }
}

/// Reads a table written by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<OutputRow>, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let body = text.strip_prefix(SCHEMA).unwrap_or(&text).trim_start_matches('\n');
    csv::Reader::from_reader(body.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| csv_err(path, e))
}

#[derive(Serialize)]
struct JsonTable<'a> {
    schema: &'a str,
    rows: &'a [OutputRow],
}

pub fn write_json(path: &Path, rows: &[OutputRow]) -> Result<(), CliError> {
    let table = JsonTable {
        schema: SCHEMA.trim_start_matches("# schema: "),
        rows,
    };
    let text = serde_json::to_string_pretty(&table).expect("rows serialize");
    fs::write(path, text + "\n").map_err(io_err(path))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailedCell {
    pub index: usize,
    pub error: String,
}

/// Everything needed to rerun an invocation.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub artifact: &'static str,
    pub version: &'static str,
    pub schema: &'static str,
    /// Resolved experiment, overrides applied.
    pub spec: ExperimentSpec,
    pub master_seed: u64,
    pub workers: usize,
    pub format: Format,
    pub wall_time_secs: f64,
    pub cells: usize,
    pub failed: Vec<FailedCell>,
}

impl Manifest {
    pub fn new(spec: &ExperimentSpec, args: &Args, outcomes: &[CellOutcome<f64>], wall: f64) -> Self {
        Self {
            artifact: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            schema: SCHEMA.trim_start_matches("# schema: "),
            spec: spec.clone(),
            master_seed: spec.seed,
            workers: args.workers,
            format: args.format,
            wall_time_secs: wall,
            cells: outcomes.len(),
            failed: outcomes
                .iter()
                .filter_map(|o| {
                    o.result.as_ref().err().map(|e| FailedCell {
                        index: o.index,
                        error: e.to_string(),
                    })
                })
                .collect(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text + "\n").map_err(io_err(path))
    }
}
