use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("number of alternatives must be at least 1")]
    NoAlternatives,
    #[error("invalid payoff bounds: need 0 < alpha <= pi_max, got alpha={alpha}, pi_max={peak}")]
    PayoffBounds { peak: f64, alpha: f64 },
    #[error("noise half-width must be finite and nonnegative, got {0}")]
    NoiseWidth(f64),
    #[error("expected payoffs must have a unique finite maximum")]
    PayoffVector,
    #[error("action {action} out of range for {arms} alternatives")]
    ActionOutOfRange { action: usize, arms: usize },
    #[error("temperature must be nonnegative, got {0}")]
    NegativeTemperature(f64),
    #[error("{name} must lie in [0, 1], got {value}")]
    RateOutOfRange { name: &'static str, value: f64 },
    #[error("inspiration temperatures must satisfy tau_low <= tau_high")]
    InspirationOrder,
    #[error("belief vectors differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("sharing frequency must be at least 1")]
    SharingFrequency,
    #[error("random sharing mask asks for {dims} dimensions out of {arms}")]
    SharingDimensions { dims: usize, arms: usize },
    #[error("invalid topology: {0}")]
    Topology(String),
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error("configuration lists {given} agent parameter sets for {nodes} nodes")]
    AgentCount { given: usize, nodes: usize },
    #[error("mode {0} is only defined for the dyad topology")]
    ModeNeedsDyad(&'static str),
    #[error("no traces to aggregate")]
    EmptyTraces,
    #[error("traces disagree on {0}")]
    RaggedTraces(&'static str),
    #[error("switching needs at least two periods")]
    ShortHorizon,
    #[error("experiment has no cells")]
    EmptyGrid,
    #[error("run count must be at least 1")]
    NoRuns,
    #[error("grid step {0} does not divide [0, 1]")]
    GridStep(f64),
    #[error("could not start worker pool: {0}")]
    Workers(String),
    #[error("cell {cell} failed: {reason}")]
    CellFailed { cell: usize, reason: String },
}
