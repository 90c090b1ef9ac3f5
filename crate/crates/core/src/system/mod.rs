//! One simulation run: the per-period pipeline over a topology of agents.
//!
//! Every period executes, in order:
//!
//! 1. each agent draws an action from its current beliefs;
//! 2. payoffs are realized independently per agent;
//! 3. experiential updates (every alternative under full feedback);
//! 4. observation or imitation of each neighbour, in ascending node index;
//! 5. simultaneous belief blending, on sharing periods;
//! 6. inspiration temperatures are set for the next period.

mod topology;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{AgentParams, BeliefVector, Chooser, Temperature};
use crate::env::TaskEnvironment;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::vicarious::{self, SharingPolicy};

pub use topology::{Network, Topology};

/// Random streams carved out of a run seed.
pub mod stream {
    pub const DYNAMICS: u64 = 0;
    pub const TOPOLOGY: u64 = 1;
    pub const ENVIRONMENT: u64 = 2;
    pub const PRIORS: u64 = 3;
}

/// A ChaCha8 generator for one of the run's streams.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// What each agent can learn from its neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Isolated individual learners.
    None,
    BeliefSharing,
    /// Complete observation of actions and payoffs.
    Observational,
    /// Actions only.
    Imitation,
    /// Payoffs only.
    Inspiration,
    /// Observation followed by belief sharing.
    Hybrid,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::None,
        Mode::BeliefSharing,
        Mode::Observational,
        Mode::Imitation,
        Mode::Inspiration,
        Mode::Hybrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::None => "none",
            Mode::BeliefSharing => "belief_sharing",
            Mode::Observational => "observational",
            Mode::Imitation => "imitation",
            Mode::Inspiration => "inspiration",
            Mode::Hybrid => "hybrid",
        }
    }

    fn observes(self) -> bool {
        matches!(self, Mode::Observational | Mode::Hybrid)
    }

    fn shares(self) -> bool {
        matches!(self, Mode::BeliefSharing | Mode::Hybrid)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

/// How belief sharing generalizes beyond a single pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkBlend {
    /// Every node blends toward the equal-weight mean of its neighbours'
    /// pre-blend beliefs, all nodes at once.
    #[default]
    NeighborMean,
    /// Pairwise simultaneous blends applied edge by edge in ascending order.
    SequentialPairs,
}

/// Within-period order of own and observed updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateOrder {
    #[default]
    OwnFirst,
    ObservedFirst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig<F> {
    pub mode: Mode,
    pub topology: Topology,
    /// One parameter set per node.
    pub agents: Vec<AgentParams<F>>,
    pub sharing: SharingPolicy,
    /// Every alternative is fed back every period.
    pub full_feedback: bool,
    pub horizon: usize,
    pub network_blend: NetworkBlend,
    pub update_order: UpdateOrder,
}

impl<F: Real> SystemConfig<F> {
    /// A dyad of identical agents with every-period, all-dimension sharing.
    pub fn dyad(mode: Mode, params: AgentParams<F>, horizon: usize) -> Self {
        Self {
            mode,
            topology: Topology::Dyad,
            agents: vec![params; 2],
            sharing: SharingPolicy::default(),
            full_feedback: false,
            horizon,
            network_blend: NetworkBlend::default(),
            update_order: UpdateOrder::default(),
        }
    }

    pub fn validate(&self, arms: usize) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::EmptyHorizon);
        }
        self.topology.validate()?;
        let nodes = self.topology.nodes();
        if self.agents.len() != nodes {
            return Err(Error::AgentCount {
                given: self.agents.len(),
                nodes,
            });
        }
        if matches!(self.mode, Mode::Imitation | Mode::Inspiration) && self.topology != Topology::Dyad
        {
            return Err(Error::ModeNeedsDyad(self.mode.name()));
        }
        self.sharing.validate(arms)?;
        self.agents.iter().try_for_each(AgentParams::validate)
    }
}

/// Record of one run: actions and payoffs per period and agent.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace<F> {
    agents: usize,
    arms: usize,
    optimal_index: usize,
    actions: Vec<u32>,
    payoffs: Vec<F>,
    pub final_beliefs: Vec<BeliefVector<F>>,
}

impl<F: Real> RunTrace<F> {
    /// Assembles a trace from per-period rows; used for hand-built fixtures.
    pub fn from_rows(
        arms: usize,
        optimal_index: usize,
        actions: &[Vec<usize>],
        payoffs: &[Vec<F>],
    ) -> Result<Self> {
        let agents = actions.first().map_or(0, Vec::len);
        if actions.len() != payoffs.len()
            || actions.iter().any(|r| r.len() != agents)
            || payoffs.iter().any(|r| r.len() != agents)
        {
            return Err(Error::RaggedTraces("row length"));
        }
        if optimal_index >= arms || actions.iter().flatten().any(|&a| a >= arms) {
            return Err(Error::ActionOutOfRange {
                action: optimal_index.max(actions.iter().flatten().copied().max().unwrap_or(0)),
                arms,
            });
        }
        Ok(Self {
            agents,
            arms,
            optimal_index,
            actions: actions.iter().flatten().map(|&a| a as u32).collect(),
            payoffs: payoffs.iter().flatten().copied().collect(),
            final_beliefs: Vec::new(),
        })
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn periods(&self) -> usize {
        if self.agents == 0 {
            0
        } else {
            self.actions.len() / self.agents
        }
    }

    pub fn optimal_index(&self) -> usize {
        self.optimal_index
    }

    /// `period` is 0-based.
    pub fn actions_at(&self, period: usize) -> impl Iterator<Item = usize> + '_ {
        let k = self.agents;
        self.actions[period * k..(period + 1) * k]
            .iter()
            .map(|&a| a as usize)
    }

    pub fn payoffs_at(&self, period: usize) -> &[F] {
        let k = self.agents;
        &self.payoffs[period * k..(period + 1) * k]
    }

    pub fn action(&self, period: usize, agent: usize) -> usize {
        self.actions[period * self.agents + agent] as usize
    }

    pub fn is_optimal(&self, period: usize, agent: usize) -> bool {
        self.action(period, agent) == self.optimal_index
    }

    /// Every agent chose the same action.
    pub fn all_matched(&self, period: usize) -> bool {
        let mut it = self.actions_at(period);
        match it.next() {
            Some(first) => it.all(|a| a == first),
            None => true,
        }
    }
}

/// A run in progress.
#[derive(Debug, Clone)]
pub struct Simulation<'a, F> {
    config: &'a SystemConfig<F>,
    env: &'a TaskEnvironment<F>,
    network: Network,
    beliefs: Vec<BeliefVector<F>>,
    temperatures: Vec<Temperature<F>>,
    period: usize,
    actions: Vec<usize>,
    payoffs: Vec<F>,
    chooser: Chooser<F>,
    snapshot: Vec<F>,
    reference: Vec<F>,
    rng: ChaCha8Rng,
}

impl<'a, F: Real> Simulation<'a, F> {
    /// Validates the configuration, builds the topology from the seed's
    /// topology stream and seeds the dynamics stream.
    pub fn new(
        config: &'a SystemConfig<F>,
        env: &'a TaskEnvironment<F>,
        priors: Vec<BeliefVector<F>>,
        seed: u64,
    ) -> Result<Self> {
        let arms = env.arms();
        config.validate(arms)?;
        if priors.len() != config.agents.len() {
            return Err(Error::AgentCount {
                given: priors.len(),
                nodes: config.agents.len(),
            });
        }
        if let Some(p) = priors.iter().find(|p| p.len() != arms) {
            return Err(Error::LengthMismatch(p.len(), arms));
        }
        let network = config.topology.build(&mut stream_rng(seed, stream::TOPOLOGY))?;
        let n = priors.len();
        Ok(Self {
            config,
            env,
            network,
            temperatures: config.agents.iter().map(|a| a.temperature).collect(),
            beliefs: priors,
            period: 0,
            actions: vec![0; n],
            payoffs: vec![F::zero(); n],
            chooser: Chooser::default(),
            snapshot: Vec::new(),
            reference: vec![F::zero(); arms],
            rng: stream_rng(seed, stream::DYNAMICS),
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn beliefs(&self) -> &[BeliefVector<F>] {
        &self.beliefs
    }

    /// Actions chosen in the most recent period.
    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn payoffs(&self) -> &[F] {
        &self.payoffs
    }

    /// Temperatures that will be used for the next choice.
    pub fn temperatures(&self) -> &[Temperature<F>] {
        &self.temperatures
    }

    /// Periods completed so far.
    pub fn period(&self) -> usize {
        self.period
    }

    /// Advances one period.
    pub fn step(&mut self) {
        self.period += 1;
        let cfg = self.config;
        let n = self.beliefs.len();
        let inspiration = cfg.mode == Mode::Inspiration;

        let own_max: Vec<F> = if inspiration {
            self.beliefs.iter().map(BeliefVector::max).collect()
        } else {
            Vec::new()
        };
        for i in 0..n {
            self.actions[i] = self
                .chooser
                .choose(&self.beliefs[i], self.temperatures[i], &mut self.rng);
        }
        for i in 0..n {
            self.payoffs[i] = self.env.realize(self.actions[i], &mut self.rng);
        }

        match cfg.update_order {
            UpdateOrder::OwnFirst => {
                self.learn_from_experience();
                self.learn_from_neighbors();
            }
            UpdateOrder::ObservedFirst => {
                self.learn_from_neighbors();
                self.learn_from_experience();
            }
        }

        if cfg.mode.shares() && cfg.sharing.shares_in(self.period) {
            match cfg.network_blend {
                NetworkBlend::NeighborMean => self.blend_neighbor_mean(),
                NetworkBlend::SequentialPairs => self.blend_pairs(),
            }
        }

        if inspiration {
            for i in 0..n {
                let other = self.network.neighbors(i)[0];
                let insp = cfg.agents[i].inspiration;
                self.temperatures[i] = vicarious::inspiration_tau(
                    self.payoffs[other],
                    own_max[i],
                    insp.threshold,
                    insp.low,
                    insp.high,
                );
            }
        }
    }

    fn learn_from_experience(&mut self) {
        let cfg = self.config;
        for (i, b) in self.beliefs.iter_mut().enumerate() {
            let p = &cfg.agents[i];
            if cfg.full_feedback {
                for j in 0..b.len() {
                    let x = if j == self.actions[i] {
                        self.payoffs[i]
                    } else {
                        self.env.realize(j, &mut self.rng)
                    };
                    b.incorporate(j, x, p.learning_rate, p.update_rule);
                }
            } else {
                b.incorporate(self.actions[i], self.payoffs[i], p.learning_rate, p.update_rule);
            }
        }
    }

    fn learn_from_neighbors(&mut self) {
        let cfg = self.config;
        let peak = self.env.peak();
        match cfg.mode {
            m if m.observes() => {
                for (i, b) in self.beliefs.iter_mut().enumerate() {
                    let p = &cfg.agents[i];
                    for &k in self.network.neighbors(i) {
                        b.incorporate(
                            self.actions[k],
                            self.payoffs[k],
                            p.observational_rate,
                            p.update_rule,
                        );
                    }
                }
            }
            Mode::Imitation => {
                for (i, b) in self.beliefs.iter_mut().enumerate() {
                    let rate = cfg.agents[i].observational_rate;
                    for &k in self.network.neighbors(i) {
                        b.incorporate(self.actions[k], peak, rate, crate::UpdateRule::Ewa);
                    }
                }
            }
            _ => {}
        }
    }

    fn blend_neighbor_mean(&mut self) {
        let cfg = self.config;
        let arms = self.env.arms();
        self.snapshot.clear();
        for b in &self.beliefs {
            self.snapshot.extend_from_slice(b.values());
        }
        for i in 0..self.beliefs.len() {
            let neighbors = self.network.neighbors(i);
            if neighbors.is_empty() {
                continue;
            }
            let dims = cfg.sharing.select(
                arms,
                neighbors.iter().map(|&k| self.actions[k]),
                &mut self.rng,
            );
            let count = F::lit(neighbors.len() as f64);
            for j in 0..arms {
                let mut acc = self.snapshot[neighbors[0] * arms + j];
                for &k in &neighbors[1..] {
                    acc = acc + self.snapshot[k * arms + j];
                }
                self.reference[j] = acc / count;
            }
            let weight = cfg.agents[i].sharing_weight;
            vicarious::blend_toward(&mut self.beliefs[i], &self.reference, weight, &dims)
                .expect("belief lengths checked at construction");
        }
    }

    fn blend_pairs(&mut self) {
        let cfg = self.config;
        let arms = self.env.arms();
        let edges: Vec<(usize, usize)> = self.network.edges().collect();
        for (i, j) in edges {
            let dims_i = cfg.sharing.select(arms, [self.actions[j]], &mut self.rng);
            let dims_j = cfg.sharing.select(arms, [self.actions[i]], &mut self.rng);
            let (wi, wj) = (cfg.agents[i].sharing_weight, cfg.agents[j].sharing_weight);
            let (lo, hi) = self.beliefs.split_at_mut(j);
            let (a, b) = (&mut lo[i], &mut hi[0]);
            let a_before = a.values().to_vec();
            vicarious::blend_toward(a, b.values(), wi, &dims_i)
                .and_then(|_| vicarious::blend_toward(b, &a_before, wj, &dims_j))
                .expect("belief lengths checked at construction");
        }
    }

    /// Runs to the horizon, recording every period.
    pub fn run_to_end(mut self) -> RunTrace<F> {
        let n = self.beliefs.len();
        let horizon = self.config.horizon;
        let mut actions = Vec::with_capacity(horizon * n);
        let mut payoffs = Vec::with_capacity(horizon * n);
        while self.period < horizon {
            self.step();
            actions.extend(self.actions.iter().map(|&a| a as u32));
            payoffs.extend_from_slice(&self.payoffs);
        }
        RunTrace {
            agents: n,
            arms: self.env.arms(),
            optimal_index: self.env.optimal_index(),
            actions,
            payoffs,
            final_beliefs: self.beliefs,
        }
    }
}

/// Runs `config` on `env` from `priors`; deterministic in all four inputs.
pub fn run<F: Real>(
    config: &SystemConfig<F>,
    env: &TaskEnvironment<F>,
    priors: Vec<BeliefVector<F>>,
    seed: u64,
) -> Result<RunTrace<F>> {
    Ok(Simulation::new(config, env, priors, seed)?.run_to_end())
}

/// Draws one prior vector per node from the seed's prior stream.
pub fn draw_priors<F: Real, R: Rng + ?Sized>(
    nodes: usize,
    arms: usize,
    rng: &mut R,
) -> Result<Vec<BeliefVector<F>>> {
    (0..nodes)
        .map(|_| crate::agents::init_priors(arms, rng))
        .collect()
}

#[cfg(test)]
mod tests;
