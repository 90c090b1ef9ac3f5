//! Outcome measures aggregated over runs.
//!
//! Per-run values are folded into fixed-point integer sums, so every
//! aggregate is independent of the order in which runs arrive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::system::RunTrace;

/// 2^56 fixed-point scale: values of magnitude >= 1/8 are held exactly, and
/// squares of |x| < 2^11 leave headroom for 2^49 terms.
const SCALE: f64 = (1u64 << 56) as f64;

/// Exact, order-insensitive sum of quantized values and their squares.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct ExactMoments {
    n: u64,
    sum: i128,
    sum_sq: i128,
}

impl ExactMoments {
    #[inline]
    fn push(&mut self, x: f64) {
        assert!(x.abs() < 2048.0, "metric value {x} outside the fixed-point range");
        self.n += 1;
        self.sum += (x * SCALE).round() as i128;
        self.sum_sq += (x * x * SCALE).round() as i128;
    }

    fn merge(&mut self, other: &Self) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum as f64 / SCALE / self.n as f64
        }
    }

    /// Standard error of the mean with the `n - 1` sample variance.
    fn std_err(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let s = self.sum as f64 / SCALE;
        let q = self.sum_sq as f64 / SCALE;
        let var = ((q - s * s / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// Mean and standard error per period (index 0 is period 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesStat<F> {
    pub mean: Vec<F>,
    pub std_err: Vec<F>,
}

impl<F: Real> SeriesStat<F> {
    fn from_moments(m: &[ExactMoments]) -> Self {
        Self {
            mean: m.iter().map(|x| F::lit(x.mean())).collect(),
            std_err: m.iter().map(|x| F::lit(x.std_err())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// Value at 1-based `period`.
    pub fn at(&self, period: usize) -> F {
        self.mean[period - 1]
    }

    pub fn se_at(&self, period: usize) -> F {
        self.std_err[period - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    CumulativePayoff,
    JointOptimal,
    MeanPayoff,
    SameAction,
    SwitchProb,
}

impl Metric {
    /// Sorted by name.
    pub const ALL: [Metric; 5] = [
        Metric::CumulativePayoff,
        Metric::JointOptimal,
        Metric::MeanPayoff,
        Metric::SameAction,
        Metric::SwitchProb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::CumulativePayoff => "cumulative_payoff",
            Metric::JointOptimal => "joint_optimal",
            Metric::MeanPayoff => "mean_payoff",
            Metric::SameAction => "same_action",
            Metric::SwitchProb => "switch_prob",
        }
    }
}

/// Every per-period outcome series of one experiment cell.
///
/// `switch_prob` has an entry for period 1 fixed at zero; switching is only
/// defined from period 2 on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries<F> {
    pub runs: usize,
    pub mean_payoff: SeriesStat<F>,
    pub joint_optimal: SeriesStat<F>,
    pub same_action: SeriesStat<F>,
    pub switch_prob: SeriesStat<F>,
    pub cumulative_payoff: SeriesStat<F>,
}

impl<F: Real> MetricSeries<F> {
    pub fn from_traces(traces: &[RunTrace<F>]) -> Result<Self> {
        let first = traces.first().ok_or(Error::EmptyTraces)?;
        let mut acc = MetricAccumulator::new(first.periods());
        for t in traces {
            acc.push(t)?;
        }
        acc.finish()
    }

    pub fn get(&self, metric: Metric) -> &SeriesStat<F> {
        match metric {
            Metric::CumulativePayoff => &self.cumulative_payoff,
            Metric::JointOptimal => &self.joint_optimal,
            Metric::MeanPayoff => &self.mean_payoff,
            Metric::SameAction => &self.same_action,
            Metric::SwitchProb => &self.switch_prob,
        }
    }

    pub fn periods(&self) -> usize {
        self.mean_payoff.len()
    }

    /// Mean payoff over all periods, agents and runs.
    pub fn cumulative(&self) -> (F, F) {
        let t = self.periods();
        (self.cumulative_payoff.at(t), self.cumulative_payoff.se_at(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScopeLevel {
    /// Distinct actions per agent, averaged over agents.
    Agent,
    /// Distinct actions in the union over agents.
    System,
}

/// Per-run search scope plus its mean and standard error across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScopeStats<F> {
    pub per_run: Vec<F>,
    pub mean: F,
    pub std_err: F,
}

/// Streaming aggregation of run traces.
#[derive(Debug, Clone)]
pub struct MetricAccumulator {
    horizon: usize,
    runs: usize,
    mean_payoff: Vec<ExactMoments>,
    joint_optimal: Vec<ExactMoments>,
    same_action: Vec<ExactMoments>,
    switch_prob: Vec<ExactMoments>,
    cumulative: Vec<ExactMoments>,
    agent_scope: ExactMoments,
    system_scope: ExactMoments,
}

impl MetricAccumulator {
    pub fn new(horizon: usize) -> Self {
        let zeros = vec![ExactMoments::default(); horizon];
        Self {
            horizon,
            runs: 0,
            mean_payoff: zeros.clone(),
            joint_optimal: zeros.clone(),
            same_action: zeros.clone(),
            switch_prob: zeros.clone(),
            cumulative: zeros,
            agent_scope: ExactMoments::default(),
            system_scope: ExactMoments::default(),
        }
    }

    pub fn runs(&self) -> usize {
        self.runs
    }

    pub fn push<F: Real>(&mut self, trace: &RunTrace<F>) -> Result<()> {
        if trace.periods() != self.horizon {
            return Err(Error::RaggedTraces("horizon"));
        }
        let agents = trace.agents();
        if agents == 0 {
            return Err(Error::RaggedTraces("agent count"));
        }
        let k = agents as f64;
        let mut running = 0.0f64;
        for t in 0..self.horizon {
            let payoff = trace
                .payoffs_at(t)
                .iter()
                .map(|x| x.as_f64())
                .sum::<f64>()
                / k;
            self.mean_payoff[t].push(payoff);
            running += payoff;
            self.cumulative[t].push(running / (t + 1) as f64);

            let joint = (0..agents).all(|i| trace.is_optimal(t, i));
            self.joint_optimal[t].push(f64::from(u8::from(joint)));
            self.same_action[t].push(f64::from(u8::from(trace.all_matched(t))));

            let switched = if t == 0 {
                0
            } else {
                (0..agents)
                    .filter(|&i| trace.action(t, i) != trace.action(t - 1, i))
                    .count()
            };
            self.switch_prob[t].push(switched as f64 / k);
        }
        let (agent, system) = scope_of(trace);
        self.agent_scope.push(agent);
        self.system_scope.push(system);
        self.runs += 1;
        Ok(())
    }

    /// Folds in another accumulator over the same horizon. Exact, so any
    /// merge tree gives the same result.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if other.horizon != self.horizon {
            return Err(Error::RaggedTraces("horizon"));
        }
        let pairs = [
            (&mut self.mean_payoff, &other.mean_payoff),
            (&mut self.joint_optimal, &other.joint_optimal),
            (&mut self.same_action, &other.same_action),
            (&mut self.switch_prob, &other.switch_prob),
            (&mut self.cumulative, &other.cumulative),
        ];
        for (mine, theirs) in pairs {
            for (a, b) in mine.iter_mut().zip(theirs) {
                a.merge(b);
            }
        }
        self.agent_scope.merge(&other.agent_scope);
        self.system_scope.merge(&other.system_scope);
        self.runs += other.runs;
        Ok(())
    }

    pub fn finish<F: Real>(&self) -> Result<MetricSeries<F>> {
        if self.runs == 0 {
            return Err(Error::EmptyTraces);
        }
        Ok(MetricSeries {
            runs: self.runs,
            mean_payoff: SeriesStat::from_moments(&self.mean_payoff),
            joint_optimal: SeriesStat::from_moments(&self.joint_optimal),
            same_action: SeriesStat::from_moments(&self.same_action),
            switch_prob: SeriesStat::from_moments(&self.switch_prob),
            cumulative_payoff: SeriesStat::from_moments(&self.cumulative),
        })
    }

    /// `(mean, std_err)` of the search scope at `level`.
    pub fn scope<F: Real>(&self, level: ScopeLevel) -> (F, F) {
        let m = match level {
            ScopeLevel::Agent => &self.agent_scope,
            ScopeLevel::System => &self.system_scope,
        };
        (F::lit(m.mean()), F::lit(m.std_err()))
    }
}

fn scope_of<F: Real>(trace: &RunTrace<F>) -> (f64, f64) {
    let arms = trace.arms();
    let agents = trace.agents();
    let mut tried = vec![false; arms * agents];
    let mut union = vec![false; arms];
    for t in 0..trace.periods() {
        for (i, a) in trace.actions_at(t).enumerate() {
            tried[i * arms + a] = true;
            union[a] = true;
        }
    }
    let per_agent = tried.iter().filter(|&&x| x).count() as f64 / agents as f64;
    let system = union.iter().filter(|&&x| x).count() as f64;
    (per_agent, system)
}

fn check_traces<F: Real>(traces: &[RunTrace<F>]) -> Result<usize> {
    let first = traces.first().ok_or(Error::EmptyTraces)?;
    let horizon = first.periods();
    if traces.iter().any(|t| t.periods() != horizon) {
        return Err(Error::RaggedTraces("horizon"));
    }
    Ok(horizon)
}

fn series_by<F: Real>(
    traces: &[RunTrace<F>],
    periods: std::ops::Range<usize>,
    value: impl Fn(&RunTrace<F>, usize) -> f64,
) -> SeriesStat<F> {
    let moments: Vec<ExactMoments> = periods
        .map(|t| {
            let mut m = ExactMoments::default();
            for tr in traces {
                m.push(value(tr, t));
            }
            m
        })
        .collect();
    SeriesStat::from_moments(&moments)
}

/// Mean realized payoff over runs and agents, per period.
pub fn mean_payoff_series<F: Real>(traces: &[RunTrace<F>]) -> Result<SeriesStat<F>> {
    let horizon = check_traces(traces)?;
    Ok(series_by(traces, 0..horizon, |tr, t| {
        tr.payoffs_at(t).iter().map(|x| x.as_f64()).sum::<f64>() / tr.agents() as f64
    }))
}

/// Fraction of runs in which every agent chose the optimal alternative.
pub fn joint_optimal_series<F: Real>(traces: &[RunTrace<F>]) -> Result<SeriesStat<F>> {
    let horizon = check_traces(traces)?;
    Ok(series_by(traces, 0..horizon, |tr, t| {
        f64::from(u8::from((0..tr.agents()).all(|i| tr.is_optimal(t, i))))
    }))
}

/// Fraction of runs in which all agents chose the same action.
pub fn same_action_series<F: Real>(traces: &[RunTrace<F>]) -> Result<SeriesStat<F>> {
    let horizon = check_traces(traces)?;
    Ok(series_by(traces, 0..horizon, |tr, t| {
        f64::from(u8::from(tr.all_matched(t)))
    }))
}

/// Probability of switching, for periods `2..=T` (index 0 is period 2).
pub fn switch_prob_series<F: Real>(traces: &[RunTrace<F>]) -> Result<SeriesStat<F>> {
    let horizon = check_traces(traces)?;
    if horizon < 2 {
        return Err(Error::ShortHorizon);
    }
    Ok(series_by(traces, 1..horizon, |tr, t| {
        let k = tr.agents();
        (0..k).filter(|&i| tr.action(t, i) != tr.action(t - 1, i)).count() as f64 / k as f64
    }))
}

/// Number of distinct alternatives sampled over the whole run.
pub fn search_scope<F: Real>(traces: &[RunTrace<F>], level: ScopeLevel) -> Result<ScopeStats<F>> {
    if traces.is_empty() {
        return Err(Error::EmptyTraces);
    }
    let mut m = ExactMoments::default();
    let per_run = traces
        .iter()
        .map(|tr| {
            let (agent, system) = scope_of(tr);
            let x = match level {
                ScopeLevel::Agent => agent,
                ScopeLevel::System => system,
            };
            m.push(x);
            F::lit(x)
        })
        .collect();
    Ok(ScopeStats {
        per_run,
        mean: F::lit(m.mean()),
        std_err: F::lit(m.std_err()),
    })
}
