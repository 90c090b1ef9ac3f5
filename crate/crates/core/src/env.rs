//! Task environments: hidden expected payoffs and their noisy realization.

use rand::Rng;

use crate::error::{Error, Result};
use crate::num::Real;

/// A bandit with one peak alternative and `m - 1` uniformly drawn others.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskEnvironment<F> {
    expected_payoffs: Vec<F>,
    optimal_index: usize,
    noise_half_width: F,
}

impl<F: Real> TaskEnvironment<F> {
    /// Samples an environment with `m` alternatives.
    ///
    /// One alternative, placed uniformly at random, pays `peak` in
    /// expectation; every other expected payoff is drawn from the open
    /// interval `(0, upper)`. `upper == peak` is accepted: the open draw keeps
    /// the peak unique.
    pub fn sample<R: Rng + ?Sized>(
        m: usize,
        peak: F,
        upper: F,
        noise_half_width: F,
        rng: &mut R,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::NoAlternatives);
        }
        if !(upper > F::zero()) || !(upper <= peak) || !peak.is_finite() {
            return Err(Error::PayoffBounds {
                peak: peak.as_f64(),
                alpha: upper.as_f64(),
            });
        }
        check_noise(noise_half_width)?;

        let optimal_index = rng.random_range(0..m);
        let expected_payoffs = (0..m)
            .map(|j| {
                if j == optimal_index {
                    peak
                } else {
                    open_uniform(upper, rng)
                }
            })
            .collect();
        Ok(Self {
            expected_payoffs,
            optimal_index,
            noise_half_width,
        })
    }

    /// Builds an environment from explicit payoffs. The maximum must be unique.
    pub fn from_payoffs(expected_payoffs: Vec<F>, noise_half_width: F) -> Result<Self> {
        check_noise(noise_half_width)?;
        if expected_payoffs.is_empty() {
            return Err(Error::NoAlternatives);
        }
        if expected_payoffs.iter().any(|p| !p.is_finite()) {
            return Err(Error::PayoffVector);
        }
        let optimal_index = argmax(&expected_payoffs);
        let peak = expected_payoffs[optimal_index];
        if expected_payoffs.iter().filter(|&&p| p == peak).count() != 1 {
            return Err(Error::PayoffVector);
        }
        Ok(Self {
            expected_payoffs,
            optimal_index,
            noise_half_width,
        })
    }

    pub fn arms(&self) -> usize {
        self.expected_payoffs.len()
    }

    pub fn expected_payoffs(&self) -> &[F] {
        &self.expected_payoffs
    }

    pub fn optimal_index(&self) -> usize {
        self.optimal_index
    }

    pub fn peak(&self) -> F {
        self.expected_payoffs[self.optimal_index]
    }

    pub fn noise_half_width(&self) -> F {
        self.noise_half_width
    }

    /// Expected payoff plus `U(-eps, eps)` noise, drawn fresh on every call.
    pub fn realize_payoff<R: Rng + ?Sized>(&self, action: usize, rng: &mut R) -> Result<F> {
        if action >= self.arms() {
            return Err(Error::ActionOutOfRange {
                action,
                arms: self.arms(),
            });
        }
        Ok(self.realize(action, rng))
    }

    /// Unchecked variant for callers that produced `action` themselves.
    #[inline]
    pub(crate) fn realize<R: Rng + ?Sized>(&self, action: usize, rng: &mut R) -> F {
        let mean = self.expected_payoffs[action];
        let eps = self.noise_half_width;
        if eps == F::zero() {
            return mean;
        }
        let two = F::one() + F::one();
        mean + eps * (two * F::open_unit(rng) - F::one())
    }
}

fn check_noise<F: Real>(eps: F) -> Result<()> {
    if eps.is_finite() && eps >= F::zero() {
        Ok(())
    } else {
        Err(Error::NoiseWidth(eps.as_f64()))
    }
}

// `upper * u` can round up to `upper`; redraw so the bound stays strict.
fn open_uniform<F: Real, R: Rng + ?Sized>(upper: F, rng: &mut R) -> F {
    loop {
        let x = upper * F::open_unit(rng);
        if x > F::zero() && x < upper {
            return x;
        }
    }
}

pub(crate) fn argmax<F: Real>(xs: &[F]) -> usize {
    let mut best = 0;
    for (j, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = j;
        }
    }
    best
}
