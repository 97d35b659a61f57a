//! Cascade processes: the synchronous generation oracle, the node-at-a-time
//! and edge-at-a-time reformulations, and the block-model schedules.

mod edge;
mod generations;
mod node;
mod realization;
mod rules;
mod seeds;

pub use edge::run_edge_process;
pub use generations::run_generations;
pub use node::{run_block_process, run_node_process, Schedule};
pub use realization::{Realization, Thresholds, Weights};
pub use rules::{parse_threshold_rule, threshold_rules, ConstantRule, Log2Rule, SqrtRule, ThresholdRule};
pub use seeds::SeedSpec;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::influence::InfluenceSpec;
use crate::registry::Registry;
use crate::SimRng;

/// What a process runs on.
#[derive(Debug, Clone, Copy)]
pub enum Substrate<'a> {
    Explicit(&'a Graph),
    /// G(n,p) with edges revealed only when they can matter.
    ImplicitGnp { n: usize, p: f64 },
}

impl Substrate<'_> {
    pub fn node_count(&self) -> usize {
        match self {
            Substrate::Explicit(g) => g.node_count(),
            Substrate::ImplicitGnp { n, .. } => *n,
        }
    }

    pub fn num_communities(&self) -> usize {
        match self {
            Substrate::Explicit(g) => g.num_communities(),
            Substrate::ImplicitGnp { .. } => 1,
        }
    }

    pub(crate) fn graph(&self, process: &str) -> Result<&Graph> {
        match self {
            Substrate::Explicit(g) => Ok(g),
            Substrate::ImplicitGnp { .. } => Err(Error::invalid(
                "substrate",
                format!("the {process} process needs a materialized graph"),
            )),
        }
    }
}

/// How node thresholds and edge weights are drawn.
#[derive(Debug, Clone)]
pub enum Dynamics {
    Influence(InfluenceSpec),
    /// Unit weights and the deterministic threshold `r(degree)`.
    DegreeRule(Arc<dyn ThresholdRule>),
}

impl Dynamics {
    pub fn describe(&self) -> String {
        match self {
            Dynamics::Influence(s) => format!("R={} W={}", s.threshold, s.weight),
            Dynamics::DegreeRule(r) => format!("r(d)={}", r.name()),
        }
    }

    pub fn has_negative_weights(&self) -> bool {
        match self {
            Dynamics::Influence(s) => s.sequential_semantics(),
            Dynamics::DegreeRule(_) => false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub trajectory: bool,
    pub record_active: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryPoint {
    pub step: usize,
    /// Usable active nodes (node processes) or usable edges (edge process).
    pub usable: usize,
    /// Cumulative influences that landed on inactive nodes.
    pub marks: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeOutcome {
    pub final_active: usize,
    /// Used nodes for node processes, consumed edges for the edge process,
    /// generations for the oracle.
    pub steps: usize,
    pub per_community_active: Vec<usize>,
    pub per_community_used: Vec<usize>,
    pub trajectory: Option<Vec<TrajectoryPoint>>,
    /// Sorted final active set, if requested.
    pub active: Option<Vec<u32>>,
    pub rng_seed: Option<u64>,
}

impl CascadeOutcome {
    pub fn fraction(&self, n: usize) -> f64 {
        self.final_active as f64 / n as f64
    }

    pub const CSV_HEADER: [&'static str; 6] =
        ["model", "seeds", "rng_seed", "final_active", "steps", "per_community_active"];

    pub fn csv_record(&self, model: &str, seeds: &str) -> [String; 6] {
        [
            model.to_string(),
            seeds.to_string(),
            self.rng_seed.map_or(String::new(), |s| s.to_string()),
            self.final_active.to_string(),
            self.steps.to_string(),
            self.per_community_active
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(";"),
        ]
    }
}

/// Collects trajectory points and thins them to at most ~1000 at the end.
pub(crate) struct Recorder {
    points: Option<Vec<TrajectoryPoint>>,
}

impl Recorder {
    pub(crate) fn new(enabled: bool) -> Self {
        Recorder {
            points: enabled.then(Vec::new),
        }
    }

    #[inline]
    pub(crate) fn record(&mut self, step: usize, usable: usize, marks: u64) {
        if let Some(p) = &mut self.points {
            p.push(TrajectoryPoint { step, usable, marks });
        }
    }

    pub(crate) fn finish(self) -> Option<Vec<TrajectoryPoint>> {
        let points = self.points?;
        let stride = points.len().div_ceil(1000).max(1);
        let last = points.last().copied();
        let mut kept: Vec<TrajectoryPoint> = points.into_iter().step_by(stride).collect();
        if let Some(last) = last {
            if kept.last() != Some(&last) {
                kept.push(last);
            }
        }
        Some(kept)
    }
}

/// Validates seeds and returns an activity mask of length `n`.
pub(crate) fn seed_mask(n: usize, seeds: &[u32]) -> Result<Vec<bool>> {
    if seeds.len() > n {
        return Err(Error::invalid(
            "seeds",
            format!("{} seeds for {n} nodes", seeds.len()),
        ));
    }
    let mut mask = vec![false; n];
    for &s in seeds {
        let s = s as usize;
        if s >= n {
            return Err(Error::invalid("seeds", format!("node {s} out of range 0..{n}")));
        }
        if mask[s] {
            return Err(Error::invalid("seeds", format!("node {s} listed twice")));
        }
        mask[s] = true;
    }
    Ok(mask)
}

pub(crate) fn active_list(active: impl Iterator<Item = bool>) -> Vec<u32> {
    active
        .enumerate()
        .filter(|&(_, a)| a)
        .map(|(v, _)| v as u32)
        .collect()
}

/// One way of running a cascade.
pub trait CascadeProcess: Send + Sync {
    fn name(&self) -> &'static str;

    fn run(
        &self,
        substrate: Substrate<'_>,
        seeds: &[u32],
        realization: &Realization,
        options: RunOptions,
        rng: &mut SimRng,
    ) -> Result<CascadeOutcome>;
}

impl fmt::Debug for dyn CascadeProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CascadeProcess({})", self.name())
    }
}

struct Generations;
struct NodeProcess;
struct EdgeProcess;
struct BlockProcess(Schedule);

impl CascadeProcess for Generations {
    fn name(&self) -> &'static str {
        "generations"
    }
    fn run(
        &self,
        substrate: Substrate<'_>,
        seeds: &[u32],
        realization: &Realization,
        options: RunOptions,
        rng: &mut SimRng,
    ) -> Result<CascadeOutcome> {
        run_generations(substrate.graph("generations")?, seeds, realization, options, rng)
    }
}

impl CascadeProcess for NodeProcess {
    fn name(&self) -> &'static str {
        "node"
    }
    fn run(
        &self,
        substrate: Substrate<'_>,
        seeds: &[u32],
        realization: &Realization,
        options: RunOptions,
        rng: &mut SimRng,
    ) -> Result<CascadeOutcome> {
        run_node_process(substrate, seeds, realization, options, rng)
    }
}

impl CascadeProcess for EdgeProcess {
    fn name(&self) -> &'static str {
        "edge"
    }
    fn run(
        &self,
        substrate: Substrate<'_>,
        seeds: &[u32],
        realization: &Realization,
        options: RunOptions,
        rng: &mut SimRng,
    ) -> Result<CascadeOutcome> {
        run_edge_process(substrate.graph("edge")?, seeds, realization, options, rng)
    }
}

impl CascadeProcess for BlockProcess {
    fn name(&self) -> &'static str {
        match self.0 {
            Schedule::Paired => "block-paired",
            Schedule::GlobalUniform => "block-global",
        }
    }
    fn run(
        &self,
        substrate: Substrate<'_>,
        seeds: &[u32],
        realization: &Realization,
        options: RunOptions,
        rng: &mut SimRng,
    ) -> Result<CascadeOutcome> {
        run_block_process(substrate.graph(self.name())?, seeds, realization, self.0, options, rng)
    }
}

pub fn cascade_processes() -> Registry<dyn CascadeProcess> {
    let mut reg: Registry<dyn CascadeProcess> = Registry::new("cascade process");
    reg.register(
        "generations",
        "synchronous generations; nonnegative weights only",
        |_| Ok(Box::new(Generations)),
    );
    reg.register(
        "node",
        "one usable active node explored per step (any weights, implicit G(n,p))",
        |_| Ok(Box::new(NodeProcess)),
    );
    reg.register(
        "edge",
        "one usable edge consumed per step; unit weights",
        |_| Ok(Box::new(EdgeProcess)),
    );
    reg.register(
        "block-paired",
        "one usable node per community per step",
        |_| Ok(Box::new(BlockProcess(Schedule::Paired))),
    );
    reg.register(
        "block-global",
        "one usable node per step, uniform over all communities",
        |_| Ok(Box::new(BlockProcess(Schedule::GlobalUniform))),
    );
    reg
}
