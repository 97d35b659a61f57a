use crate::criticality::{block_seed_bounds, constant_r};
use crate::engine::{Dynamics, SeedSpec};
use crate::error::{Error, Result};
use crate::graph::{GraphModel, ModelLaw};

use super::{Runner, SweepRow};

#[derive(Debug, Clone)]
pub struct PlacementRow {
    pub allocation: Vec<usize>,
    pub stats: SweepRow,
}

#[derive(Debug, Clone)]
pub struct PlacementTable {
    pub rows: Vec<PlacementRow>,
    /// Argmax of `n_k p_kk^r` for block models with a constant threshold.
    pub argmax_community: Option<usize>,
    /// Allocation with the highest mean final fraction.
    pub best: usize,
    /// `(mean_best - mean_i) / pooled standard error` for every row.
    pub margins: Vec<f64>,
}

impl PlacementTable {
    /// True when the best allocation beats every other one by `sigmas`
    /// pooled standard errors.
    pub fn dominates(&self, sigmas: f64) -> bool {
        self.margins
            .iter()
            .enumerate()
            .all(|(i, &m)| i == self.best || m >= sigmas)
    }
}

/// Mean final fraction for each per-community allocation of the same total.
/// Allocation `i` uses point index `i`, so rows are reproducible on their own.
pub fn seed_placement_experiment(
    model: &dyn GraphModel,
    dynamics: &Dynamics,
    allocations: &[Vec<usize>],
    runs: usize,
    seed: u64,
    workers: usize,
) -> Result<PlacementTable> {
    if allocations.is_empty() {
        return Err(Error::invalid("allocations", "none given"));
    }
    let sizes = model.community_sizes();
    let total: usize = allocations[0].iter().sum();
    for alloc in allocations {
        if alloc.len() != sizes.len() {
            return Err(Error::invalid(
                "allocation",
                format!("{} entries for {} communities", alloc.len(), sizes.len()),
            ));
        }
        if alloc.iter().sum::<usize>() != total {
            return Err(Error::invalid("allocation", "allocations must share one total"));
        }
        if let Some(k) = (0..sizes.len()).find(|&k| alloc[k] > sizes[k]) {
            return Err(Error::invalid(
                "allocation",
                format!("{} seeds in community {k} of size {}", alloc[k], sizes[k]),
            ));
        }
    }
    let runner = Runner::new(model, dynamics, "node", seed, true, workers)?;
    let rows = allocations
        .iter()
        .enumerate()
        .map(|(i, alloc)| {
            let stats = runner.point(i as u64, &SeedSpec::PerCommunity(alloc.clone()), runs)?;
            Ok(PlacementRow { allocation: alloc.clone(), stats })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = (0..rows.len())
        .max_by(|&a, &b| rows[a].stats.mean_fraction.total_cmp(&rows[b].stats.mean_fraction).then(b.cmp(&a)))
        .expect("nonempty");
    let margins = rows
        .iter()
        .map(|r| {
            let b = &rows[best].stats;
            let pooled = (b.std_error().powi(2) + r.stats.std_error().powi(2)).sqrt();
            let diff = b.mean_fraction - r.stats.mean_fraction;
            if pooled > 0.0 {
                diff / pooled
            } else if diff > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect();
    let argmax_community = match (model.law(), constant_r(dynamics)) {
        (ModelLaw::Block { sizes, probs }, Some(r)) => {
            block_seed_bounds(&sizes, &probs, r, 0.0).ok().map(|b| b.optimal_community)
        }
        _ => None,
    };
    Ok(PlacementTable { rows, argmax_community, best, margins })
}
