//! Monte Carlo simulation of vicarious learning between bandit learners.
//!
//! Agents face a shared multi-armed bandit, choose by softmax (or greedily)
//! over their beliefs and learn from their own payoffs. On top of that they
//! may learn vicariously: by blending belief vectors, by observing each
//! other's actions and payoffs, from actions alone (imitation) or from
//! payoffs alone (inspiration).
//!
//! All simulation types are generic over the scalar type; the aliases below
//! fix it to `f64`.

pub mod agents;
pub mod env;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod num;
pub mod system;
pub mod vicarious;

pub use agents::{AgentParams, BeliefVector, InspirationParams, Temperature, UpdateRule};
pub use env::TaskEnvironment;
pub use error::{Error, Result};
pub use harness::{CellParams, ExperimentSpec, Grid};
pub use metrics::{Metric, MetricSeries, ScopeLevel};
pub use num::Real;
pub use system::{Mode, NetworkBlend, RunTrace, SystemConfig, Topology, UpdateOrder};
pub use vicarious::{SharingMask, SharingPolicy};

pub type Environment = TaskEnvironment<f64>;
pub type Beliefs = BeliefVector<f64>;
pub type Params = AgentParams<f64>;
pub type Tau = Temperature<f64>;
pub type Config = SystemConfig<f64>;
pub type Trace = RunTrace<f64>;
pub type Series = MetricSeries<f64>;
