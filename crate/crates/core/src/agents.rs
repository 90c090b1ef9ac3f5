//! Agent beliefs, softmax/greedy choice and experiential updating.

use std::fmt;

use rand::Rng;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::num::Real;

/// Exploration setting for the softmax rule.
///
/// `Greedy` is the exact `tau -> 0` limit: all mass on the maximal beliefs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature<F> {
    Greedy,
    Softmax(F),
}

impl<F: Real> Temperature<F> {
    /// `0` maps to `Greedy`; negative or NaN values are rejected.
    pub fn new(tau: F) -> Result<Self> {
        if tau.is_nan() || tau < F::zero() {
            Err(Error::NegativeTemperature(tau.as_f64()))
        } else if tau == F::zero() {
            Ok(Self::Greedy)
        } else {
            Ok(Self::Softmax(tau))
        }
    }

    /// Numeric value with `Greedy` as zero.
    pub fn value(self) -> F {
        match self {
            Self::Greedy => F::zero(),
            Self::Softmax(t) => t,
        }
    }
}

impl<F: Real> fmt::Display for Temperature<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Greedy => f.write_str("greedy"),
            Self::Softmax(t) => write!(f, "{t}"),
        }
    }
}

// Serialized as the string "greedy" or a plain number.
impl<F: Real> Serialize for Temperature<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Greedy => s.serialize_str("greedy"),
            Self::Softmax(t) => s.serialize_f64(t.as_f64()),
        }
    }
}

impl<'de, F: Real> Deserialize<'de> for Temperature<F> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct Visitor<F>(std::marker::PhantomData<F>);

        impl<F: Real> de::Visitor<'_> for Visitor<F> {
            type Value = Temperature<F>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"greedy\" or a nonnegative number")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
                if v == "greedy" {
                    return Ok(Temperature::Greedy);
                }
                let x: f64 = v
                    .parse()
                    .map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))?;
                self.visit_f64(x)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Self::Value, E> {
                Temperature::new(F::lit(v)).map_err(|_| E::invalid_value(de::Unexpected::Float(v), &self))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }
        }

        d.deserialize_any(Visitor(std::marker::PhantomData))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateRule {
    /// Exponentially recency-weighted average, `r += phi (x - r)`.
    #[default]
    Ewa,
    /// Running sample mean; the prior counts as one observation.
    Averaging,
}

/// Temperature switch driven by the other agent's observed payoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InspirationParams<F> {
    pub low: Temperature<F>,
    pub high: Temperature<F>,
    pub threshold: F,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentParams<F> {
    /// Experiential learning rate.
    pub learning_rate: F,
    /// Rate for observed payoffs and for imitation.
    pub observational_rate: F,
    /// Weight placed on the other's beliefs when sharing.
    pub sharing_weight: F,
    pub temperature: Temperature<F>,
    pub inspiration: InspirationParams<F>,
    pub update_rule: UpdateRule,
}

impl<F: Real> AgentParams<F> {
    /// Symmetric defaults: observational rate tied to `learning_rate`,
    /// sharing weight 0.5, EWA updating.
    pub fn new(learning_rate: F, temperature: Temperature<F>) -> Self {
        Self {
            learning_rate,
            observational_rate: learning_rate,
            sharing_weight: F::lit(0.5),
            temperature,
            inspiration: InspirationParams {
                low: Temperature::Softmax(F::lit(0.01)),
                high: Temperature::Softmax(F::lit(0.1)),
                threshold: F::lit(1.5),
            },
            update_rule: UpdateRule::Ewa,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_rate("phi", self.learning_rate)?;
        check_rate("phi_ol", self.observational_rate)?;
        check_rate("phi_bs", self.sharing_weight)?;
        for t in [self.temperature, self.inspiration.low, self.inspiration.high] {
            Temperature::new(t.value())?;
        }
        if self.inspiration.low.value() > self.inspiration.high.value() {
            return Err(Error::InspirationOrder);
        }
        if !(self.inspiration.threshold >= F::zero()) {
            return Err(Error::RateOutOfRange {
                name: "c",
                value: self.inspiration.threshold.as_f64(),
            });
        }
        Ok(())
    }
}

pub(crate) fn check_rate<F: Real>(name: &'static str, value: F) -> Result<()> {
    if value >= F::zero() && value <= F::one() {
        Ok(())
    } else {
        Err(Error::RateOutOfRange {
            name,
            value: value.as_f64(),
        })
    }
}

/// An agent's representation: one belief per alternative plus the number of
/// samples folded into each (used by the averaging rule).
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefVector<F> {
    values: Vec<F>,
    sample_counts: Vec<u64>,
}

impl<F: Real> BeliefVector<F> {
    /// Beliefs with every count at one (the prior pseudo-observation).
    pub fn from_values(values: Vec<F>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NoAlternatives);
        }
        let sample_counts = vec![1; values.len()];
        Ok(Self {
            values,
            sample_counts,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn sample_counts(&self) -> &[u64] {
        &self.sample_counts
    }

    pub fn max(&self) -> F {
        self.values
            .iter()
            .copied()
            .fold(F::neg_infinity(), F::max)
    }

    pub(crate) fn values_mut(&mut self) -> &mut [F] {
        &mut self.values
    }

    /// Moves the belief on `action` toward `target` under `rule`. `rate` is
    /// ignored by the averaging rule.
    #[inline]
    pub fn incorporate(&mut self, action: usize, target: F, rate: F, rule: UpdateRule) {
        let r = &mut self.values[action];
        match rule {
            UpdateRule::Ewa => *r = *r + rate * (target - *r),
            UpdateRule::Averaging => {
                let n = &mut self.sample_counts[action];
                *r = *r + (target - *r) / F::lit((*n + 1) as f64);
                *n += 1;
            }
        }
    }

    pub(crate) fn check_action(&self, action: usize) -> Result<()> {
        if action < self.len() {
            Ok(())
        } else {
            Err(Error::ActionOutOfRange {
                action,
                arms: self.len(),
            })
        }
    }
}

/// Priors drawn i.i.d. from `U(0, 1)`.
pub fn init_priors<F: Real, R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<BeliefVector<F>> {
    if m == 0 {
        return Err(Error::NoAlternatives);
    }
    BeliefVector::from_values((0..m).map(|_| F::open_unit(rng)).collect())
}

/// Softmax choice probabilities, evaluated with max-shifted exponents.
pub fn choice_probabilities<F: Real>(
    beliefs: &BeliefVector<F>,
    tau: Temperature<F>,
) -> Result<Vec<F>> {
    let values = beliefs.values();
    let top = beliefs.max();
    match Temperature::new(tau.value())? {
        Temperature::Greedy => {
            let ties = values.iter().filter(|&&r| r == top).count();
            let share = F::one() / F::lit(ties as f64);
            Ok(values
                .iter()
                .map(|&r| if r == top { share } else { F::zero() })
                .collect())
        }
        Temperature::Softmax(t) => {
            let weights: Vec<F> = values.iter().map(|&r| ((r - top) / t).exp()).collect();
            let total: F = weights.iter().copied().sum();
            Ok(weights.into_iter().map(|w| w / total).collect())
        }
    }
}

/// Samples an action from [`choice_probabilities`].
pub fn choose<F: Real, R: Rng + ?Sized>(
    beliefs: &BeliefVector<F>,
    tau: Temperature<F>,
    rng: &mut R,
) -> Result<usize> {
    let tau = Temperature::new(tau.value())?;
    Ok(Chooser::default().choose(beliefs, tau, rng))
}

/// Reusable scratch space for repeated choices.
#[derive(Debug, Clone, Default)]
pub struct Chooser<F> {
    weights: Vec<F>,
}

impl<F: Real> Chooser<F> {
    /// `tau` must already be validated.
    pub fn choose<R: Rng + ?Sized>(
        &mut self,
        beliefs: &BeliefVector<F>,
        tau: Temperature<F>,
        rng: &mut R,
    ) -> usize {
        let values = beliefs.values();
        match tau {
            Temperature::Greedy => greedy(values, rng),
            Temperature::Softmax(t) => {
                let top = beliefs.max();
                self.weights.clear();
                self.weights
                    .extend(values.iter().map(|&r| ((r - top) / t).exp()));
                let total: F = self.weights.iter().copied().sum();
                let target = F::unit(rng) * total;
                let mut acc = F::zero();
                let mut last = 0;
                for (j, &w) in self.weights.iter().enumerate() {
                    if w > F::zero() {
                        acc = acc + w;
                        last = j;
                        if acc > target {
                            return j;
                        }
                    }
                }
                last
            }
        }
    }
}

fn greedy<F: Real, R: Rng + ?Sized>(values: &[F], rng: &mut R) -> usize {
    let mut best = 0;
    let mut ties = 1usize;
    for (j, &r) in values.iter().enumerate().skip(1) {
        if r > values[best] {
            best = j;
            ties = 1;
        } else if r == values[best] {
            ties += 1;
        }
    }
    if ties == 1 {
        return best;
    }
    let top = values[best];
    let pick = rng.random_range(0..ties);
    values
        .iter()
        .enumerate()
        .filter(|(_, &r)| r == top)
        .nth(pick)
        .map(|(j, _)| j)
        .unwrap_or(best)
}

/// Applies own experience on `action` using `params.learning_rate` and
/// `params.update_rule`. Other alternatives are untouched.
pub fn update_experiential<F: Real>(
    beliefs: &mut BeliefVector<F>,
    action: usize,
    payoff: F,
    params: &AgentParams<F>,
) -> Result<()> {
    beliefs.check_action(action)?;
    beliefs.incorporate(action, payoff, params.learning_rate, params.update_rule);
    Ok(())
}
