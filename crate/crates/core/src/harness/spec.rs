//! Experiment descriptions: parameter grids and the cells they expand to.

use serde::{Deserialize, Serialize};

use crate::agents::{AgentParams, InspirationParams, Temperature, UpdateRule};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::system::{Mode, NetworkBlend, SystemConfig, Topology, UpdateOrder};
use crate::vicarious::{SharingMask, SharingPolicy};

/// Inspiration switch settings, shared by every agent of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inspiration {
    pub tau_low: Temperature<f64>,
    pub tau_high: Temperature<f64>,
    pub threshold: f64,
}

impl Default for Inspiration {
    fn default() -> Self {
        Self {
            tau_low: Temperature::Softmax(0.01),
            tau_high: Temperature::Softmax(0.1),
            threshold: 1.5,
        }
    }
}

/// One fully specified experimental condition.
///
/// In systems larger than a dyad, agent `i` takes `phi_1`/`rules[0]` for even
/// `i` and `phi_2`/`rules[1]` for odd `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    pub mode: Mode,
    pub topology: Topology,
    pub m: usize,
    pub pi_max: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub tau: Temperature<f64>,
    pub phi_1: f64,
    pub phi_2: f64,
    /// `None` ties each agent's observational rate to its own `phi`.
    pub phi_ol: Option<f64>,
    pub phi_bs: f64,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub sharing: SharingPolicy,
    pub full_feedback: bool,
    pub rules: [UpdateRule; 2],
    pub inspiration: Inspiration,
    pub network_blend: NetworkBlend,
    pub update_order: UpdateOrder,
}

impl Default for CellParams {
    fn default() -> Self {
        Self {
            mode: Mode::None,
            topology: Topology::Dyad,
            m: 50,
            pi_max: 1.0,
            alpha: 0.8,
            epsilon: 0.1,
            tau: Temperature::Greedy,
            phi_1: 0.5,
            phi_2: 0.5,
            phi_ol: None,
            phi_bs: 0.5,
            horizon: 1000,
            sharing: SharingPolicy::default(),
            full_feedback: false,
            rules: [UpdateRule::Ewa; 2],
            inspiration: Inspiration::default(),
            network_blend: NetworkBlend::default(),
            update_order: UpdateOrder::default(),
        }
    }
}

impl CellParams {
    pub fn agent_params<F: Real>(&self, index: usize) -> AgentParams<F> {
        let phi = if index % 2 == 0 { self.phi_1 } else { self.phi_2 };
        let lit_tau = |t: Temperature<f64>| match t {
            Temperature::Greedy => Temperature::Greedy,
            Temperature::Softmax(x) => Temperature::Softmax(F::lit(x)),
        };
        AgentParams {
            learning_rate: F::lit(phi),
            observational_rate: F::lit(self.phi_ol.unwrap_or(phi)),
            sharing_weight: F::lit(self.phi_bs),
            temperature: lit_tau(self.tau),
            inspiration: InspirationParams {
                low: lit_tau(self.inspiration.tau_low),
                high: lit_tau(self.inspiration.tau_high),
                threshold: F::lit(self.inspiration.threshold),
            },
            update_rule: self.rules[index % 2],
        }
    }

    pub fn system_config<F: Real>(&self) -> Result<SystemConfig<F>> {
        let config = SystemConfig {
            mode: self.mode,
            topology: self.topology,
            agents: (0..self.topology.nodes()).map(|i| self.agent_params(i)).collect(),
            sharing: self.sharing,
            full_feedback: self.full_feedback,
            horizon: self.horizon,
            network_blend: self.network_blend,
            update_order: self.update_order,
        };
        config.validate(self.m)?;
        Ok(config)
    }

    /// Settings that have no column of their own in tabular output, as
    /// short `key=value` tags; empty for baseline cells.
    pub fn variant_tags(&self) -> Vec<String> {
        let mut tags = Vec::new();
        if self.rules != [UpdateRule::Ewa; 2] {
            let name = |r: UpdateRule| match r {
                UpdateRule::Ewa => "ewa",
                UpdateRule::Averaging => "avg",
            };
            tags.push(format!("rules={}-{}", name(self.rules[0]), name(self.rules[1])));
        }
        if self.full_feedback {
            tags.push("full_feedback".into());
        }
        if self.mode == Mode::Inspiration && self.inspiration != Inspiration::default() {
            let i = self.inspiration;
            tags.push(format!("insp={}/{}/{}", i.tau_low, i.tau_high, i.threshold));
        }
        if self.network_blend == NetworkBlend::SequentialPairs {
            tags.push("blend=pairs".into());
        }
        if self.update_order == UpdateOrder::ObservedFirst {
            tags.push("order=observed_first".into());
        }
        tags
    }

    /// Key identifying the cell up to its mode; cells sharing it form one
    /// common-random-numbers group.
    pub(crate) fn group_key(&self) -> String {
        let mut c = self.clone();
        c.mode = Mode::None;
        format!("{c:?}")
    }
}

/// A Cartesian product of parameter values. Every axis must be nonempty,
/// except `phi_2` and `phi_ol`, where an empty list means "tied": `phi_2`
/// to `phi_1`, and `phi_ol` to each agent's own rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub mode: Vec<Mode>,
    pub topology: Vec<Topology>,
    pub m: Vec<usize>,
    pub pi_max: Vec<f64>,
    pub alpha: Vec<f64>,
    pub epsilon: Vec<f64>,
    #[serde(rename = "T")]
    pub horizon: Vec<usize>,
    pub tau: Vec<Temperature<f64>>,
    pub rules: Vec<[UpdateRule; 2]>,
    pub full_feedback: Vec<bool>,
    pub sharing_mask: Vec<SharingMask>,
    pub sharing_freq: Vec<usize>,
    pub phi_bs: Vec<f64>,
    pub phi_1: Vec<f64>,
    pub phi_2: Vec<f64>,
    pub phi_ol: Vec<f64>,
    pub inspiration: Inspiration,
    pub network_blend: NetworkBlend,
    pub update_order: UpdateOrder,
}

impl Default for Grid {
    fn default() -> Self {
        let base = CellParams::default();
        Self {
            mode: vec![base.mode],
            topology: vec![base.topology],
            m: vec![base.m],
            pi_max: vec![base.pi_max],
            alpha: vec![base.alpha],
            epsilon: vec![base.epsilon],
            horizon: vec![base.horizon],
            tau: vec![base.tau],
            rules: vec![base.rules],
            full_feedback: vec![base.full_feedback],
            sharing_mask: vec![base.sharing.mask],
            sharing_freq: vec![base.sharing.frequency],
            phi_bs: vec![base.phi_bs],
            phi_1: vec![base.phi_1],
            phi_2: Vec::new(),
            phi_ol: Vec::new(),
            inspiration: base.inspiration,
            network_blend: base.network_blend,
            update_order: base.update_order,
        }
    }
}

// Replaces every cell by one copy per value; earlier axes vary slowest.
fn expand<T>(cells: &mut Vec<CellParams>, values: &[T], set: impl Fn(&mut CellParams, &T)) {
    *cells = cells
        .iter()
        .flat_map(|c| {
            values.iter().map(|v| {
                let mut c = c.clone();
                set(&mut c, v);
                c
            })
        })
        .collect();
}

impl Grid {
    pub fn len(&self) -> usize {
        self.mode.len()
            * self.topology.len()
            * self.m.len()
            * self.pi_max.len()
            * self.alpha.len()
            * self.epsilon.len()
            * self.horizon.len()
            * self.tau.len()
            * self.rules.len()
            * self.full_feedback.len()
            * self.sharing_mask.len()
            * self.sharing_freq.len()
            * self.phi_bs.len()
            * self.phi_1.len()
            * self.phi_2.len().max(1)
            * self.phi_ol.len().max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Expands to cells; the mode varies fastest, then `phi_ol`, `phi_2`,
    /// `phi_1`, ... back to `topology`.
    pub fn cells(&self) -> Vec<CellParams> {
        let mut cells = vec![CellParams {
            inspiration: self.inspiration,
            network_blend: self.network_blend,
            update_order: self.update_order,
            ..CellParams::default()
        }];
        expand(&mut cells, &self.topology, |c, &v| c.topology = v);
        expand(&mut cells, &self.m, |c, &v| c.m = v);
        expand(&mut cells, &self.pi_max, |c, &v| c.pi_max = v);
        expand(&mut cells, &self.alpha, |c, &v| c.alpha = v);
        expand(&mut cells, &self.epsilon, |c, &v| c.epsilon = v);
        expand(&mut cells, &self.horizon, |c, &v| c.horizon = v);
        expand(&mut cells, &self.tau, |c, &v| c.tau = v);
        expand(&mut cells, &self.rules, |c, &v| c.rules = v);
        expand(&mut cells, &self.full_feedback, |c, &v| c.full_feedback = v);
        expand(&mut cells, &self.sharing_mask, |c, &v| c.sharing.mask = v);
        expand(&mut cells, &self.sharing_freq, |c, &v| c.sharing.frequency = v);
        expand(&mut cells, &self.phi_bs, |c, &v| c.phi_bs = v);
        expand(&mut cells, &self.phi_1, |c, &v| {
            c.phi_1 = v;
            c.phi_2 = v;
        });
        if !self.phi_2.is_empty() {
            expand(&mut cells, &self.phi_2, |c, &v| c.phi_2 = v);
        }
        if !self.phi_ol.is_empty() {
            expand(&mut cells, &self.phi_ol, |c, &v| c.phi_ol = Some(v));
        }
        expand(&mut cells, &self.mode, |c, &v| c.mode = v);
        cells
    }
}

/// A named set of grids plus run count and master seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(rename = "grid")]
    pub grids: Vec<Grid>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Reuse per-run seeds across modes of otherwise identical cells.
    #[serde(default)]
    pub crn: bool,
    /// Also report search-scope summaries per cell.
    #[serde(default)]
    pub search_scope: bool,
}

fn default_name() -> String {
    "custom".into()
}

fn default_runs() -> usize {
    super::DEFAULT_RUNS
}

fn default_seed() -> u64 {
    super::DEFAULT_SEED
}

impl ExperimentSpec {
    pub fn new(name: impl Into<String>, grids: Vec<Grid>) -> Self {
        Self {
            name: name.into(),
            grids,
            runs: super::DEFAULT_RUNS,
            seed: super::DEFAULT_SEED,
            crn: false,
            search_scope: false,
        }
    }

    pub fn cells(&self) -> Vec<CellParams> {
        self.grids.iter().flat_map(Grid::cells).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::NoRuns);
        }
        if self.grids.is_empty() || self.grids.iter().any(Grid::is_empty) {
            return Err(Error::EmptyGrid);
        }
        Ok(())
    }
}
