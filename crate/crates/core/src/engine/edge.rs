use rand::Rng;

use super::{active_list, seed_mask, CascadeOutcome, Realization, Recorder, RunOptions, Thresholds};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::SimRng;

/// Consumes one uniformly chosen usable edge per step. A node activates on
/// collecting `r` marks and makes its edges toward inactive nodes usable.
pub fn run_edge_process(
    g: &Graph,
    seeds: &[u32],
    real: &Realization,
    options: RunOptions,
    rng: &mut SimRng,
) -> Result<CascadeOutcome> {
    let n = g.node_count();
    real.check_node_count(n)?;
    if !real.is_unit_weight() {
        return Err(Error::invalid("edge process", "requires unit weights"));
    }
    let r: Vec<u32> = match &real.thresholds {
        Thresholds::Constant(t) => vec![t.ceil() as u32; n],
        Thresholds::PerNode(t) => t.iter().map(|x| x.ceil() as u32).collect(),
    };
    if let Some(v) = (0..n).find(|&v| r[v] < 2) {
        return Err(Error::invalid(
            "edge process",
            format!("node {v} (degree {}) has threshold {} < 2", g.degree(v), r[v]),
        ));
    }
    let mut active = seed_mask(n, seeds)?;
    let mut k_active = vec![0usize; g.num_communities()];
    let mut marks = vec![0u32; n];
    let mut usable: Vec<u32> = Vec::new();
    for &s in seeds {
        k_active[g.community(s as usize) as usize] += 1;
        usable.extend(g.neighbors(s as usize).iter().filter(|&&v| !active[v as usize]));
    }
    let mut recorder = Recorder::new(options.trajectory);
    let mut total_marks = 0u64;
    let mut t = 0usize;
    recorder.record(0, usable.len(), 0);
    while !usable.is_empty() {
        let pick = rng.random_range(0..usable.len());
        let v = usable.swap_remove(pick) as usize;
        t += 1;
        if !active[v] {
            marks[v] += 1;
            total_marks += 1;
            if marks[v] >= r[v] {
                active[v] = true;
                k_active[g.community(v) as usize] += 1;
                usable.extend(g.neighbors(v).iter().filter(|&&w| !active[w as usize]));
            }
        }
        recorder.record(t, usable.len(), total_marks);
    }
    Ok(CascadeOutcome {
        final_active: k_active.iter().sum(),
        steps: t,
        per_community_active: k_active,
        per_community_used: Vec::new(),
        trajectory: recorder.finish(),
        active: options.record_active.then(|| active_list(active.iter().copied())),
        rng_seed: None,
    })
}
