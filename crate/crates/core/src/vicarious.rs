//! Inter-agent learning channels: belief blending, complete observation,
//! imitation (action only) and inspiration (outcome only).

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{BeliefVector, Temperature, UpdateRule};
use crate::error::{Error, Result};
use crate::num::Real;

/// Which belief dimensions take part in a sharing round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SharingMask {
    #[default]
    All,
    /// The dimensions the sending neighbours chose this period.
    ChosenOnly,
    /// `d` dimensions drawn afresh every sharing period.
    RandomK(usize),
}

/// Text forms: `all`, `chosen_only`, `random_k:<d>`.
impl fmt::Display for SharingMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::All => f.write_str("all"),
            Self::ChosenOnly => f.write_str("chosen_only"),
            Self::RandomK(d) => write!(f, "random_k:{d}"),
        }
    }
}

impl FromStr for SharingMask {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "all" => Ok(Self::All),
            "chosen_only" => Ok(Self::ChosenOnly),
            _ => s
                .strip_prefix("random_k:")
                .and_then(|d| d.parse().ok())
                .map(Self::RandomK)
                .ok_or_else(|| format!("unknown sharing mask `{s}`")),
        }
    }
}

impl TryFrom<String> for SharingMask {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl From<SharingMask> for String {
    fn from(m: SharingMask) -> String {
        m.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharingPolicy {
    pub mask: SharingMask,
    /// Share on periods 1, 1 + k, 1 + 2k, ...
    pub frequency: usize,
}

impl Default for SharingPolicy {
    fn default() -> Self {
        Self {
            mask: SharingMask::All,
            frequency: 1,
        }
    }
}

impl SharingPolicy {
    pub fn validate(&self, arms: usize) -> Result<()> {
        if self.frequency == 0 {
            return Err(Error::SharingFrequency);
        }
        if let SharingMask::RandomK(d) = self.mask {
            if d > arms {
                return Err(Error::SharingDimensions { dims: d, arms });
            }
        }
        Ok(())
    }

    /// Whether 1-based `period` is a sharing period.
    pub fn shares_in(&self, period: usize) -> bool {
        (period - 1) % self.frequency == 0
    }

    /// Resolves the mask for one receiver.
    pub fn select<R: Rng + ?Sized>(
        &self,
        arms: usize,
        sender_actions: impl IntoIterator<Item = usize>,
        rng: &mut R,
    ) -> Selection {
        match self.mask {
            SharingMask::All => Selection::All,
            SharingMask::ChosenOnly => {
                let mut dims: Vec<usize> = sender_actions.into_iter().collect();
                dims.sort_unstable();
                dims.dedup();
                Selection::Only(dims)
            }
            SharingMask::RandomK(d) => {
                let mut dims = index::sample(rng, arms, d).into_vec();
                dims.sort_unstable();
                Selection::Only(dims)
            }
        }
    }
}

/// A resolved set of dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    All,
    Only(Vec<usize>),
}

impl Selection {
    fn for_each(&self, arms: usize, mut f: impl FnMut(usize)) {
        match self {
            Self::All => (0..arms).for_each(f),
            Self::Only(dims) => dims.iter().for_each(|&j| f(j)),
        }
    }
}

/// `(1 - w) own + w other`, clamped to the segment between the two so that
/// rounding never leaves the convex hull.
#[inline]
pub(crate) fn convex<F: Real>(own: F, other: F, weight: F) -> F {
    let x = (F::one() - weight) * own + weight * other;
    x.max(own.min(other)).min(own.max(other))
}

/// One party of a blending exchange.
#[derive(Debug, Clone, PartialEq)]
pub struct BlendSide<'a, F> {
    pub beliefs: &'a BeliefVector<F>,
    pub weight_on_other: F,
    pub dims: Selection,
}

/// Simultaneous weighted averaging of two belief vectors.
///
/// Both outputs are computed from the two inputs; sample counts are kept.
pub fn blend_beliefs<F: Real>(
    first: BlendSide<'_, F>,
    second: BlendSide<'_, F>,
) -> Result<(BeliefVector<F>, BeliefVector<F>)> {
    let (a, b) = (first.beliefs, second.beliefs);
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let mut out_a = a.clone();
    let mut out_b = b.clone();
    let arms = a.len();
    {
        let va = out_a.values_mut();
        first.dims.for_each(arms, |j| {
            va[j] = convex(a.values()[j], b.values()[j], first.weight_on_other)
        });
    }
    {
        let vb = out_b.values_mut();
        second.dims.for_each(arms, |j| {
            vb[j] = convex(b.values()[j], a.values()[j], second.weight_on_other)
        });
    }
    Ok((out_a, out_b))
}

/// Blends `own` toward a reference vector (the neighbour mean in networks).
pub fn blend_toward<F: Real>(
    own: &mut BeliefVector<F>,
    reference: &[F],
    weight_on_other: F,
    dims: &Selection,
) -> Result<()> {
    if own.len() != reference.len() {
        return Err(Error::LengthMismatch(own.len(), reference.len()));
    }
    let arms = own.len();
    let v = own.values_mut();
    dims.for_each(arms, |j| v[j] = convex(v[j], reference[j], weight_on_other));
    Ok(())
}

/// Learning from another agent's action and payoff, with the same arithmetic
/// as own experience but at the observational rate.
pub fn observe_complete<F: Real>(
    beliefs: &mut BeliefVector<F>,
    other_action: usize,
    other_payoff: F,
    observational_rate: F,
    rule: UpdateRule,
) -> Result<()> {
    beliefs.check_action(other_action)?;
    beliefs.incorporate(other_action, other_payoff, observational_rate, rule);
    Ok(())
}

/// Moves the belief on the observed action toward the known maximum payoff.
pub fn imitation_update<F: Real>(
    beliefs: &mut BeliefVector<F>,
    other_action: usize,
    observational_rate: F,
    peak: F,
) -> Result<()> {
    beliefs.check_action(other_action)?;
    beliefs.incorporate(other_action, peak, observational_rate, UpdateRule::Ewa);
    Ok(())
}

/// Exploration for the coming period: `high` when the other's last payoff
/// beat `threshold` times one's own best belief, `low` otherwise (ties
/// included).
pub fn inspiration_tau<F: Real>(
    other_payoff_prev: F,
    own_max_prev: F,
    threshold: F,
    low: Temperature<F>,
    high: Temperature<F>,
) -> Temperature<F> {
    if other_payoff_prev > threshold * own_max_prev {
        high
    } else {
        low
    }
}
