use super::{active_list, seed_mask, CascadeOutcome, Realization, Recorder, RunOptions};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::SimRng;

/// Least fixed point by synchronous generations: every node of the newest
/// generation fires once at all inactive neighbors, then every node whose
/// accumulated weight reached its threshold forms the next generation.
/// `steps` counts generations.
pub fn run_generations(
    g: &Graph,
    seeds: &[u32],
    real: &Realization,
    options: RunOptions,
    rng: &mut SimRng,
) -> Result<CascadeOutcome> {
    if real.has_negative_weights() {
        return Err(Error::invalid(
            "generations",
            "negative weights make the outcome order-dependent; use the node process",
        ));
    }
    let n = g.node_count();
    real.check_node_count(n)?;
    let mut active = seed_mask(n, seeds)?;
    let mut counter = vec![0.0f64; n];
    let mut frontier: Vec<u32> = seeds.to_vec();
    let mut touched: Vec<u32> = Vec::new();
    let mut recorder = Recorder::new(options.trajectory);
    let mut marks = 0u64;
    let mut generations = 0;
    let mut total = seeds.len();
    recorder.record(0, frontier.len(), 0);
    while !frontier.is_empty() {
        touched.clear();
        for &u in &frontier {
            for slot in g.slots(u as usize) {
                let v = g.target(slot) as usize;
                if active[v] {
                    continue;
                }
                counter[v] += real.weight(slot, rng);
                marks += 1;
                touched.push(v as u32);
            }
        }
        frontier.clear();
        for &v in &touched {
            let vi = v as usize;
            if !active[vi] && counter[vi] >= real.threshold(vi) {
                active[vi] = true;
                frontier.push(v);
            }
        }
        total += frontier.len();
        generations += 1;
        recorder.record(generations, frontier.len(), marks);
    }
    let mut per = vec![0usize; g.num_communities()];
    for (v, &a) in active.iter().enumerate() {
        if a {
            per[g.community(v) as usize] += 1;
        }
    }
    Ok(CascadeOutcome {
        final_active: total,
        steps: generations,
        per_community_active: per,
        per_community_used: Vec::new(),
        trajectory: recorder.finish(),
        active: options.record_active.then(|| active_list(active.iter().copied())),
        rng_seed: None,
    })
}
