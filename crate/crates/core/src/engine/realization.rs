use std::sync::Arc;

use rand::Rng;

use super::{Dynamics, Substrate};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::influence::DiscreteDistribution;
use crate::SimRng;

#[derive(Debug, Clone)]
pub enum Thresholds {
    Constant(f64),
    PerNode(Vec<f64>),
}

#[derive(Debug, Clone)]
pub enum Weights {
    Unit,
    /// Drawn when the edge first fires; every process fires an edge at most
    /// once, so this has the law of one draw per edge.
    Lazy(DiscreteDistribution),
    /// One value per adjacency slot, equal on the two slots of an edge.
    PerSlot(Arc<Vec<f64>>),
}

/// The random node thresholds and edge weights of one run.
#[derive(Debug, Clone)]
pub struct Realization {
    pub thresholds: Thresholds,
    pub weights: Weights,
}

impl Realization {
    pub fn new(thresholds: Thresholds, weights: Weights) -> Self {
        Realization {
            thresholds,
            weights,
        }
    }

    /// Thresholds drawn now, weights drawn on first use.
    pub fn draw(dynamics: &Dynamics, substrate: &Substrate<'_>, rng: &mut SimRng) -> Result<Self> {
        let n = substrate.node_count();
        match dynamics {
            Dynamics::Influence(spec) => {
                let thresholds = if spec.threshold.is_constant() {
                    Thresholds::Constant(spec.threshold.min())
                } else {
                    Thresholds::PerNode((0..n).map(|_| spec.threshold.sample(rng)).collect())
                };
                let weights = if spec.weight.is_constant() && spec.weight.min() == 1.0 {
                    Weights::Unit
                } else {
                    Weights::Lazy(spec.weight.clone())
                };
                Ok(Realization::new(thresholds, weights))
            }
            Dynamics::DegreeRule(rule) => {
                let Substrate::Explicit(g) = substrate else {
                    return Err(Error::invalid(
                        "dynamics",
                        "degree-dependent thresholds need a materialized graph",
                    ));
                };
                let thresholds = (0..n)
                    .map(|v| rule.threshold(g.degree(v) as u32) as f64)
                    .collect();
                Ok(Realization::new(Thresholds::PerNode(thresholds), Weights::Unit))
            }
        }
    }

    /// Like [`draw`](Self::draw) but with every edge weight fixed up front,
    /// so several processes can be run on the same draws.
    pub fn fixed(dynamics: &Dynamics, g: &Graph, rng: &mut SimRng) -> Result<Self> {
        let mut real = Realization::draw(dynamics, &Substrate::Explicit(g), rng)?;
        if let Weights::Lazy(dist) = &real.weights {
            let ids = g.edge_ids();
            let per_edge: Vec<f64> = (0..g.edge_count()).map(|_| dist.sample(rng)).collect();
            real.weights = Weights::PerSlot(Arc::new(ids.iter().map(|&e| per_edge[e as usize]).collect()));
        }
        Ok(real)
    }

    #[inline]
    pub fn threshold(&self, v: usize) -> f64 {
        match &self.thresholds {
            Thresholds::Constant(r) => *r,
            Thresholds::PerNode(r) => r[v],
        }
    }

    #[inline]
    pub(crate) fn weight<R: Rng + ?Sized>(&self, slot: usize, rng: &mut R) -> f64 {
        match &self.weights {
            Weights::Unit => 1.0,
            Weights::Lazy(dist) => dist.sample(rng),
            Weights::PerSlot(w) => w[slot],
        }
    }

    pub fn check_node_count(&self, n: usize) -> Result<()> {
        if let Thresholds::PerNode(r) = &self.thresholds {
            if r.len() != n {
                return Err(Error::invalid(
                    "realization",
                    format!("{} thresholds for {n} nodes", r.len()),
                ));
            }
        }
        Ok(())
    }

    pub fn has_negative_weights(&self) -> bool {
        match &self.weights {
            Weights::Unit => false,
            Weights::Lazy(d) => d.min() < 0.0,
            Weights::PerSlot(w) => w.iter().any(|&x| x < 0.0),
        }
    }

    pub fn is_unit_weight(&self) -> bool {
        match &self.weights {
            Weights::Unit => true,
            Weights::Lazy(d) => d.is_constant() && d.min() == 1.0,
            Weights::PerSlot(w) => w.iter().all(|&x| x == 1.0),
        }
    }

    /// A copy with node `v`'s threshold replaced.
    pub fn with_threshold(&self, n: usize, v: usize, value: f64) -> Self {
        let mut r: Vec<f64> = (0..n).map(|u| self.threshold(u)).collect();
        r[v] = value;
        Realization::new(Thresholds::PerNode(r), self.weights.clone())
    }
}
