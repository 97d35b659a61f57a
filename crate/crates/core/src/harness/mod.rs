//! Monte Carlo sweeps over the seed count, transition location, seed
//! placement comparisons and CSV output.

mod output;
mod placement;
mod plan;
mod transition;

pub use output::{write_csv, CSV_COLUMNS};
pub use placement::{seed_placement_experiment, PlacementRow, PlacementTable};
pub use plan::{log_grid, SweepPlan, DEFAULT_BUDGET};
pub use transition::{crossing, locate_transition};
use transition::refine_transition;

use rand::SeedableRng;
use rayon::prelude::*;

use crate::criticality::{default_predictor, predictors, CriticalPrediction};
use crate::engine::{
    cascade_processes, CascadeOutcome, CascadeProcess, Dynamics, Realization, RunOptions, SeedSpec,
    Substrate,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphModel};
use crate::registry::Params;
use crate::SimRng;

/// Stream reserved for a graph shared by every run.
const SHARED_GRAPH_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub a: usize,
    pub runs: usize,
    pub mean_fraction: f64,
    pub stddev: f64,
    /// Mean final active count `A*`.
    pub mean_active: f64,
    /// Mean final active fraction inside each community.
    pub community_fraction: Vec<f64>,
}

impl SweepRow {
    pub fn std_error(&self) -> f64 {
        self.stddev / (self.runs as f64).sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub model: String,
    pub params: Params,
    pub dynamics: String,
    pub process: String,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
    pub prediction: Option<CriticalPrediction>,
    /// Estimated 0.5-crossing, when the sweep brackets one.
    pub transition: Option<f64>,
    /// Indices `i` where row `i + 1` falls below row `i` by more than three
    /// pooled standard errors.
    pub monotonicity_violations: Vec<usize>,
}

/// Everything a batch of runs needs, resolved once.
pub(crate) struct Runner<'a> {
    model: &'a dyn GraphModel,
    dynamics: &'a Dynamics,
    process: Box<dyn CascadeProcess>,
    seed: u64,
    fresh_graph: bool,
    workers: usize,
    shared: Option<Graph>,
    sizes: Vec<usize>,
}

impl<'a> Runner<'a> {
    pub(crate) fn new(
        model: &'a dyn GraphModel,
        dynamics: &'a Dynamics,
        process: &str,
        seed: u64,
        fresh_graph: bool,
        workers: usize,
    ) -> Result<Self> {
        if workers == 0 {
            return Err(Error::invalid("workers", "must be at least 1"));
        }
        let process = cascade_processes().create(process, &Params::new())?;
        if model.implicit_gnp().is_some() && process.name() != "node" {
            return Err(Error::invalid(
                "process",
                format!("{} needs a materialized graph; use the node process", process.name()),
            ));
        }
        let shared = if model.implicit_gnp().is_none() && (!fresh_graph || model.is_fixed()) {
            let mut rng = SimRng::seed_from_u64(seed);
            rng.set_stream(SHARED_GRAPH_STREAM);
            Some(model.generate(&mut rng)?)
        } else {
            None
        };
        let sizes = match &shared {
            Some(g) => g.community_sizes(),
            None => model.community_sizes(),
        };
        Ok(Runner { model, dynamics, process, seed, fresh_graph, workers, shared, sizes })
    }

    fn one(&self, seeds: &SeedSpec, stream: u64, options: RunOptions) -> Result<CascadeOutcome> {
        let mut rng = SimRng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        let owned;
        let substrate = if let Some((n, p)) = self.model.implicit_gnp() {
            Substrate::ImplicitGnp { n, p }
        } else if let Some(g) = &self.shared {
            Substrate::Explicit(g)
        } else {
            owned = self.model.generate(&mut rng)?;
            Substrate::Explicit(&owned)
        };
        let seeds = seeds.resolve(&substrate, &mut rng)?;
        let realization = Realization::draw(self.dynamics, &substrate, &mut rng)?;
        let mut outcome = self.process.run(substrate, &seeds, &realization, options, &mut rng)?;
        outcome.rng_seed = Some(stream);
        Ok(outcome)
    }

    /// Run `j` of point `index` uses stream `(index << 32) | j`, so results
    /// do not depend on how the runs are scheduled.
    pub(crate) fn outcomes(
        &self,
        index: u64,
        seeds: &SeedSpec,
        runs: usize,
        options: RunOptions,
    ) -> Result<Vec<CascadeOutcome>> {
        if runs == 0 {
            return Err(Error::invalid("runs", "must be at least 1"));
        }
        let streams: Vec<u64> = (0..runs as u64).map(|j| (index << 32) | j).collect();
        if self.workers == 1 {
            return streams.iter().map(|&s| self.one(seeds, s, options)).collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::invalid("workers", e.to_string()))?;
        pool.install(|| streams.par_iter().map(|&s| self.one(seeds, s, options)).collect())
    }

    pub(crate) fn point(&self, index: u64, seeds: &SeedSpec, runs: usize) -> Result<SweepRow> {
        let outcomes = self.outcomes(index, seeds, runs, RunOptions::default())?;
        let n = self.model.node_count().max(1);
        let fractions: Vec<f64> = outcomes.iter().map(|o| o.fraction(n)).collect();
        let (mean, stddev) = mean_std(&fractions);
        let mean_active = outcomes.iter().map(|o| o.final_active as f64).sum::<f64>() / runs as f64;
        let community_fraction = (0..self.sizes.len())
            .map(|k| {
                let size = self.sizes[k].max(1) as f64;
                outcomes
                    .iter()
                    .map(|o| o.per_community_active.get(k).copied().unwrap_or(0) as f64 / size)
                    .sum::<f64>()
                    / runs as f64
            })
            .collect();
        Ok(SweepRow {
            a: seeds.total(),
            runs,
            mean_fraction: mean,
            stddev,
            mean_active,
            community_fraction,
        })
    }

    pub(crate) fn fresh_graph(&self) -> bool {
        self.fresh_graph && self.shared.is_none()
    }
}

/// Independent runs with one seed placement. Run `j` uses RNG stream `j`
/// of `seed`, recorded in each outcome's `rng_seed`.
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    model: &dyn GraphModel,
    dynamics: &Dynamics,
    process: &str,
    seeds: &SeedSpec,
    runs: usize,
    seed: u64,
    fresh_graph: bool,
    workers: usize,
    options: RunOptions,
) -> Result<Vec<CascadeOutcome>> {
    Runner::new(model, dynamics, process, seed, fresh_graph, workers)?.outcomes(0, seeds, runs, options)
}

/// Sample mean and standard deviation (`n - 1` denominator, 0 for one value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn monotonicity_violations(rows: &[SweepRow]) -> Vec<usize> {
    rows.windows(2)
        .enumerate()
        .filter(|(_, w)| {
            let pooled = (w[0].std_error().powi(2) + w[1].std_error().powi(2)).sqrt();
            w[0].mean_fraction - w[1].mean_fraction > 3.0 * pooled + 1e-12
        })
        .map(|(i, _)| i)
        .collect()
}

pub fn predict(model: &dyn GraphModel, dynamics: &Dynamics, predictor: Option<&str>) -> Result<CriticalPrediction> {
    let law = model.law();
    let name = predictor.unwrap_or_else(|| default_predictor(&law, dynamics));
    predictors().create(name, &Params::new())?.predict(&law, dynamics)
}

/// Runs every grid point of `plan` and locates the transition.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepResult> {
    plan.validate()?;
    let estimate = plan.work_estimate();
    if estimate > plan.budget {
        return Err(Error::Budget { estimate, budget: plan.budget });
    }
    let model: &dyn GraphModel = plan.model.as_ref();
    let runner = Runner::new(model, &plan.dynamics, &plan.process, plan.seed, plan.fresh_graph, plan.workers)?;
    log::info!(
        "sweep: {} points x {} runs on {} ({}), fresh graph per run: {}",
        plan.grid.len(),
        plan.runs,
        model.name(),
        model.params(),
        runner.fresh_graph()
    );
    let mut rows = Vec::with_capacity(plan.grid.len());
    for (i, &a) in plan.grid.iter().enumerate() {
        let row = runner.point(i as u64, &SeedSpec::Uniform(a), plan.runs)?;
        log::debug!("a = {a}: mean fraction {:.4}", row.mean_fraction);
        rows.push(row);
    }
    let prediction = match predict(model, &plan.dynamics, plan.predictor.as_deref()) {
        Ok(p) => Some(p),
        Err(e) => {
            log::warn!("no critical-size prediction: {e}");
            None
        }
    };
    let mut result = SweepResult {
        model: model.name().to_string(),
        params: model.params(),
        dynamics: plan.dynamics.describe(),
        process: plan.process.clone(),
        seed: plan.seed,
        monotonicity_violations: monotonicity_violations(&rows),
        rows,
        prediction,
        transition: None,
    };
    for &i in &result.monotonicity_violations {
        log::warn!(
            "mean fraction drops between a = {} and a = {} beyond Monte Carlo noise",
            result.rows[i].a,
            result.rows[i + 1].a
        );
    }
    result.transition = if plan.refine_rounds > 0 {
        refine_transition(&runner, &mut result.rows, plan.grid.len() as u64, plan.refine_rounds, plan.runs).ok()
    } else {
        locate_transition(&result.rows).ok()
    };
    Ok(result)
}
