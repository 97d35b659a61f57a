use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::{active_list, seed_mask, CascadeOutcome, Realization, Recorder, RunOptions, Substrate};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::SimRng;

/// Which usable nodes are explored at each step of a block-model run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// One node from each community that has one, in community order.
    Paired,
    /// One node, uniform over all usable nodes.
    GlobalUniform,
}

const INACTIVE: u8 = 0;
const ACTIVE: u8 = 1;
const USED: u8 = 2;

/// Explores one usable active node per step, firing its edges toward unused
/// nodes. On an implicit G(n,p) edges are revealed as they are explored.
pub fn run_node_process(
    substrate: Substrate<'_>,
    seeds: &[u32],
    real: &Realization,
    options: RunOptions,
    rng: &mut SimRng,
) -> Result<CascadeOutcome> {
    match substrate {
        Substrate::Explicit(g) => run_explicit(g, seeds, real, Schedule::GlobalUniform, options, rng),
        Substrate::ImplicitGnp { n, p } => run_implicit(n, p, seeds, real, options, rng),
    }
}

pub fn run_block_process(
    g: &Graph,
    seeds: &[u32],
    real: &Realization,
    schedule: Schedule,
    options: RunOptions,
    rng: &mut SimRng,
) -> Result<CascadeOutcome> {
    if schedule == Schedule::Paired && g.num_communities() < 2 {
        return Err(Error::invalid(
            "block process",
            "the paired schedule needs community labels (K >= 2)",
        ));
    }
    run_explicit(g, seeds, real, schedule, options, rng)
}

struct Explorer<'a> {
    g: &'a Graph,
    real: &'a Realization,
    state: Vec<u8>,
    counter: Vec<f64>,
    usable: Vec<Vec<u32>>,
    total_usable: usize,
    active_per: Vec<usize>,
    used_per: Vec<usize>,
    order: Vec<usize>,
    shuffle: bool,
    marks: u64,
    steps: usize,
}

impl Explorer<'_> {
    /// Removes the `pick`-th usable node of community `c` and fires its
    /// edges, in random order when weights can be negative.
    fn explore(&mut self, c: usize, pick: usize, rng: &mut SimRng) {
        let g = self.g;
        let u = self.usable[c].swap_remove(pick) as usize;
        self.total_usable -= 1;
        self.state[u] = USED;
        self.used_per[c] += 1;
        self.steps += 1;
        self.order.clear();
        self.order.extend(g.slots(u));
        if self.shuffle {
            self.order.shuffle(rng);
        }
        for i in 0..self.order.len() {
            let slot = self.order[i];
            let v = g.target(slot) as usize;
            if self.state[v] != INACTIVE {
                continue;
            }
            self.counter[v] += self.real.weight(slot, rng);
            self.marks += 1;
            if self.counter[v] >= self.real.threshold(v) {
                self.state[v] = ACTIVE;
                let cv = g.community(v) as usize;
                self.usable[cv].push(v as u32);
                self.active_per[cv] += 1;
                self.total_usable += 1;
            }
        }
    }
}

fn run_explicit(
    g: &Graph,
    seeds: &[u32],
    real: &Realization,
    schedule: Schedule,
    options: RunOptions,
    rng: &mut SimRng,
) -> Result<CascadeOutcome> {
    let n = g.node_count();
    real.check_node_count(n)?;
    let k = g.num_communities();
    let mask = seed_mask(n, seeds)?;
    let mut x = Explorer {
        g,
        real,
        state: mask.iter().map(|&s| if s { ACTIVE } else { INACTIVE }).collect(),
        counter: vec![0.0; n],
        usable: vec![Vec::new(); k],
        total_usable: seeds.len(),
        active_per: vec![0; k],
        used_per: vec![0; k],
        order: Vec::new(),
        shuffle: real.has_negative_weights(),
        marks: 0,
        steps: 0,
    };
    drop(mask);
    for &s in seeds {
        let c = g.community(s as usize) as usize;
        x.usable[c].push(s);
        x.active_per[c] += 1;
    }
    let mut recorder = Recorder::new(options.trajectory);
    recorder.record(0, x.total_usable, 0);

    let mut active = seeds.len();
    while x.total_usable > 0 {
        if active == n {
            // nothing left to influence: credit the remaining nodes as used
            for c in 0..k {
                x.used_per[c] += x.usable[c].len();
                x.usable[c].clear();
            }
            while x.total_usable > 0 {
                x.total_usable -= 1;
                x.steps += 1;
                recorder.record(x.steps, x.total_usable, x.marks);
            }
            break;
        }
        match schedule {
            Schedule::GlobalUniform => {
                let mut pick = rng.random_range(0..x.total_usable);
                let mut c = 0;
                while pick >= x.usable[c].len() {
                    pick -= x.usable[c].len();
                    c += 1;
                }
                x.explore(c, pick, rng);
            }
            Schedule::Paired => {
                for c in 0..k {
                    if !x.usable[c].is_empty() {
                        let pick = rng.random_range(0..x.usable[c].len());
                        x.explore(c, pick, rng);
                    }
                }
            }
        }
        active = x.active_per.iter().sum();
        recorder.record(x.steps, x.total_usable, x.marks);
    }

    Ok(CascadeOutcome {
        final_active: x.active_per.iter().sum(),
        steps: x.steps,
        per_community_active: x.active_per,
        per_community_used: x.used_per,
        trajectory: recorder.finish(),
        active: options
            .record_active
            .then(|| active_list(x.state.iter().map(|&s| s != INACTIVE))),
        rng_seed: None,
    })
}

/// Node process on G(n,p) by deferred decisions: when `u` is explored, each
/// inactive node is a neighbor independently with probability `p`, so the
/// number of new neighbors is one binomial draw and the recipients a uniform
/// subset. Pairs that involve an active node never influence anyone.
fn run_implicit(
    n: usize,
    p: f64,
    seeds: &[u32],
    real: &Realization,
    options: RunOptions,
    rng: &mut SimRng,
) -> Result<CascadeOutcome> {
    if let super::Weights::PerSlot(_) = real.weights {
        return Err(Error::invalid(
            "realization",
            "per-edge weights need a materialized graph",
        ));
    }
    real.check_node_count(n)?;
    let mask = seed_mask(n, seeds)?;
    const NOWHERE: u32 = u32::MAX;
    let mut pos = vec![NOWHERE; n];
    let mut inactive: Vec<u32> = Vec::with_capacity(n - seeds.len());
    for (v, &seeded) in mask.iter().enumerate() {
        if !seeded {
            pos[v] = inactive.len() as u32;
            inactive.push(v as u32);
        }
    }
    drop(mask);
    let mut counter = vec![0.0f64; n];
    let mut usable: Vec<u32> = seeds.to_vec();
    let mut recipients: Vec<u32> = Vec::new();
    let mut recorder = Recorder::new(options.trajectory);
    let mut marks = 0u64;
    let mut steps = 0usize;
    recorder.record(0, usable.len(), 0);

    while !usable.is_empty() {
        if inactive.is_empty() {
            // every remaining exploration is a no-op
            for left in (0..usable.len()).rev() {
                steps += 1;
                recorder.record(steps, left, marks);
            }
            usable.clear();
            break;
        }
        let pick = rng.random_range(0..usable.len());
        usable.swap_remove(pick);
        steps += 1;
        let m = inactive.len();
        let k = Binomial::new(m as u64, p)
            .map_err(|e| Error::invalid("gnp", e.to_string()))?
            .sample(rng) as usize;
        if k > 0 {
            recipients.clear();
            // sample returns the indices in random order
            recipients.extend(index::sample(rng, m, k).into_iter().map(|i| inactive[i]));
            for &v in &recipients {
                let v = v as usize;
                if pos[v] == NOWHERE {
                    continue;
                }
                counter[v] += real.weight(0, rng);
                marks += 1;
                if counter[v] >= real.threshold(v) {
                    let i = pos[v] as usize;
                    let last = *inactive.last().expect("v is inactive");
                    inactive.swap_remove(i);
                    if last as usize != v {
                        pos[last as usize] = i as u32;
                    }
                    pos[v] = NOWHERE;
                    usable.push(v as u32);
                }
            }
        }
        recorder.record(steps, usable.len(), marks);
    }

    let final_active = n - inactive.len();
    Ok(CascadeOutcome {
        final_active,
        steps,
        per_community_active: vec![final_active],
        per_community_used: vec![steps],
        trajectory: recorder.finish(),
        active: options.record_active.then(|| active_list(pos.iter().map(|&p| p == NOWHERE))),
        rng_seed: None,
    })
}
