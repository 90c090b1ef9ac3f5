//! Monte Carlo execution: per-run seeding, parallel dispatch over runs,
//! learning-rate sweeps and the named experiment presets.
//!
//! Every run draws its environment, priors and dynamics from its own seed,
//! and aggregation is exact, so results depend only on the spec and master
//! seed, never on the worker count or scheduling.

mod presets;
mod seed;
mod spec;

use std::panic::{self, AssertUnwindSafe};

use rayon::prelude::*;

use crate::env::TaskEnvironment;
use crate::error::{Error, Result};
use crate::metrics::{MetricAccumulator, MetricSeries, ScopeLevel};
use crate::num::Real;
use crate::system::{self, draw_priors, stream, stream_rng, RunTrace, SystemConfig};

pub use presets::{preset, PRESETS};
pub use seed::derive_run_seed;
pub use spec::{CellParams, ExperimentSpec, Grid, Inspiration};

pub const DEFAULT_RUNS: usize = 10_000;
pub const FULL_SCALE_RUNS: usize = 100_000;
pub const DEFAULT_SEED: u64 = 42;

/// Aggregates for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary<F> {
    pub series: MetricSeries<F>,
    /// `(mean, std_err)` of distinct alternatives tried per agent.
    pub agent_scope: (F, F),
    /// `(mean, std_err)` of distinct alternatives tried by the system.
    pub system_scope: (F, F),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome<F> {
    pub index: usize,
    pub params: CellParams,
    pub result: Result<CellSummary<F>>,
}

/// One run of `cell`: fresh environment and priors from their streams of
/// `seed`, then the dynamics.
pub fn simulate_run<F: Real>(
    cell: &CellParams,
    config: &SystemConfig<F>,
    seed: u64,
) -> Result<RunTrace<F>> {
    let env = TaskEnvironment::sample(
        cell.m,
        F::lit(cell.pi_max),
        F::lit(cell.alpha),
        F::lit(cell.epsilon),
        &mut stream_rng(seed, stream::ENVIRONMENT),
    )?;
    let priors = draw_priors(config.agents.len(), cell.m, &mut stream_rng(seed, stream::PRIORS))?;
    system::run(config, &env, priors, seed)
}

/// Runs `runs` replications of `cell`, run `r` seeded with `seed_of(r)`.
/// Parallel over runs on the current rayon pool.
pub fn run_cell<F: Real>(
    cell: &CellParams,
    runs: usize,
    seed_of: impl Fn(u64) -> u64 + Sync,
) -> Result<CellSummary<F>> {
    if runs == 0 {
        return Err(Error::NoRuns);
    }
    let config = cell.system_config::<F>()?;
    let fresh = || MetricAccumulator::new(cell.horizon);
    let acc = (0..runs as u64)
        .into_par_iter()
        .try_fold(fresh, |mut acc, r| {
            acc.push(&simulate_run(cell, &config, seed_of(r))?)?;
            Ok::<_, Error>(acc)
        })
        .try_reduce(fresh, |mut a, b| {
            a.merge(&b)?;
            Ok(a)
        })?;
    Ok(CellSummary {
        series: acc.finish()?,
        agent_scope: acc.scope(ScopeLevel::Agent),
        system_scope: acc.scope(ScopeLevel::System),
    })
}

/// Runs every cell of `spec` on `workers` threads (0 = all cores).
pub fn execute<F: Real>(spec: &ExperimentSpec, workers: usize) -> Result<Vec<CellOutcome<F>>> {
    execute_with(spec, workers, |_| {})
}

/// As [`execute`], calling `on_cell` as each cell finishes.
///
/// A failing or panicking cell yields an `Err` outcome and the remaining
/// cells still run.
pub fn execute_with<F: Real>(
    spec: &ExperimentSpec,
    workers: usize,
    on_cell: impl FnMut(&CellOutcome<F>),
) -> Result<Vec<CellOutcome<F>>> {
    spec.validate()?;
    let cells = spec.cells();
    let keys: Vec<u64> = if spec.crn {
        let mut first = std::collections::HashMap::new();
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| *first.entry(c.group_key()).or_insert(i) as u64)
            .collect()
    } else {
        (0..cells.len() as u64).collect()
    };
    run_cells(cells, &keys, spec.runs, spec.seed, workers, on_cell)
}

fn run_cells<F: Real>(
    cells: Vec<CellParams>,
    keys: &[u64],
    runs: usize,
    master: u64,
    workers: usize,
    mut on_cell: impl FnMut(&CellOutcome<F>),
) -> Result<Vec<CellOutcome<F>>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Workers(e.to_string()))?;
    let outcomes = cells
        .into_iter()
        .zip(keys)
        .enumerate()
        .map(|(index, (params, &key))| {
            let attempt = panic::catch_unwind(AssertUnwindSafe(|| {
                pool.install(|| run_cell(&params, runs, |r| derive_run_seed(master, key, r)))
            }));
            let result = attempt.unwrap_or_else(|payload| {
                let reason = payload
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| payload.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "panic".into());
                Err(Error::CellFailed { cell: index, reason })
            });
            let outcome = CellOutcome {
                index,
                params,
                result,
            };
            on_cell(&outcome);
            outcome
        })
        .collect();
    Ok(outcomes)
}

/// Cumulative performance over a square `(phi_1, phi_2)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap<F> {
    /// Axis values shared by both rates, ascending.
    pub rates: Vec<f64>,
    /// Row-major by `phi_1`.
    pub mean: Vec<F>,
    pub std_err: Vec<F>,
    pub runs: usize,
}

impl<F: Real> Heatmap<F> {
    pub fn side(&self) -> usize {
        self.rates.len()
    }

    /// `(mean, std_err)` at `phi_1 = rates[i]`, `phi_2 = rates[j]`.
    pub fn get(&self, i: usize, j: usize) -> (F, F) {
        let k = i * self.side() + j;
        (self.mean[k], self.std_err[k])
    }

    /// Index pair of the best cell; the first in row-major order on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let k = crate::env::argmax(&self.mean);
        (k / self.side(), k % self.side())
    }

    /// Index of the best symmetric cell.
    pub fn best_diagonal(&self) -> usize {
        let diag: Vec<F> = (0..self.side()).map(|i| self.get(i, i).0).collect();
        crate::env::argmax(&diag)
    }
}

/// Rates `0, step, 2 step, ..., 1`; `step` must divide 1.
pub fn rate_axis(step: f64) -> Result<Vec<f64>> {
    let k = (1.0 / step).round();
    if !(step > 0.0) || k < 1.0 || (k * step - 1.0).abs() > 1e-9 {
        return Err(Error::GridStep(step));
    }
    let k = k as usize;
    Ok((0..=k).map(|i| i as f64 / k as f64).collect())
}

/// Cumulative performance of `base` for every `(phi_1, phi_2)` on the
/// `step` grid. Each cell uses its own seeds under `seed`.
pub fn sweep_learning_rates<F: Real>(
    base: &CellParams,
    step: f64,
    runs: usize,
    seed: u64,
    workers: usize,
) -> Result<Heatmap<F>> {
    let rates = rate_axis(step)?;
    let cells: Vec<CellParams> = rates
        .iter()
        .flat_map(|&p1| {
            rates.iter().map(move |&p2| CellParams {
                phi_1: p1,
                phi_2: p2,
                ..base.clone()
            })
        })
        .collect();
    let keys: Vec<u64> = (0..cells.len() as u64).collect();
    let mut mean = Vec::with_capacity(cells.len());
    let mut std_err = Vec::with_capacity(cells.len());
    for outcome in run_cells::<F>(cells, &keys, runs, seed, workers, |_| {})? {
        let (m, se) = outcome.result?.series.cumulative();
        mean.push(m);
        std_err.push(se);
    }
    Ok(Heatmap {
        rates,
        mean,
        std_err,
        runs,
    })
}

#[cfg(test)]
mod tests;
