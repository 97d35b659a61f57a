//! Threshold and weight laws, and the activation profile they induce.

mod distribution;
mod profile;

pub use distribution::{DiscreteDistribution, MASS_TOLERANCE};
pub use profile::{
    activation_profile, pi_asymptotic, pi_exact, q_infinity, ActivationProfile, PiValue,
    ASYMPTOTIC_PT_LIMIT, DEFAULT_RHO_MAX,
};

use crate::error::{Error, Result};

/// Node threshold law `R` and edge weight law `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceSpec {
    pub threshold: DiscreteDistribution,
    pub weight: DiscreteDistribution,
}

impl InfluenceSpec {
    /// Requires `min R > max W > 0`, which rules out activation through a
    /// single edge.
    pub fn new(threshold: DiscreteDistribution, weight: DiscreteDistribution) -> Result<Self> {
        if threshold.min() <= 0.0 {
            return Err(Error::invalid("influence spec", "thresholds must be positive"));
        }
        if weight.max() <= 0.0 {
            return Err(Error::invalid(
                "influence spec",
                format!("ess sup W = {} must be positive", weight.max()),
            ));
        }
        if threshold.min() <= weight.max() {
            return Err(Error::invalid(
                "influence spec",
                format!(
                    "ess inf R = {} must exceed ess sup W = {}",
                    threshold.min(),
                    weight.max()
                ),
            ));
        }
        Ok(InfluenceSpec { threshold, weight })
    }

    pub fn parse(threshold: &str, weight: &str) -> Result<Self> {
        Self::new(threshold.parse()?, weight.parse()?)
    }

    /// Basic bootstrap percolation: `R = r`, `W = 1`.
    pub fn basic(r: u32) -> Result<Self> {
        Self::new(
            DiscreteDistribution::constant(r as f64),
            DiscreteDistribution::constant(1.0),
        )
    }

    /// Negative weights make the outcome depend on the order in which
    /// influences arrive.
    pub fn sequential_semantics(&self) -> bool {
        self.weight.min() < 0.0
    }

    pub fn is_unit_weight(&self) -> bool {
        self.weight.is_constant() && self.weight.min() == 1.0
    }

    pub fn profile(&self, rho_max: usize) -> Result<ActivationProfile> {
        activation_profile(self, rho_max)
    }
}

#[cfg(test)]
mod tests;
