//! Graph storage, the random graph families, degree sequences and edge-list
//! ingestion.

mod degree;
mod ingest;
mod models;

pub use degree::{powerlaw_degree_sequence, read_degree_file, write_degree_file, DegreeSequence};
pub use ingest::{ingest_edge_list, write_edge_list, write_id_map, IngestReport};
pub use models::{
    graph_models, matched_config_model, BlockModel, ConfigModel, EdgeListFile, ErdosRenyi,
    ErdosRenyiImplicit, GnmMultigraph, GraphModel, ModelLaw, PowerLawConfig,
};

use std::ops::Range;

/// Undirected (multi)graph in compressed adjacency form.
///
/// Every edge `{u, v}` occupies one slot in `u`'s list and one in `v`'s; a
/// self-loop occupies two slots in its node's list. Slots are the unit the
/// cascade engines attach per-edge weights to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    community: Vec<u32>,
    num_communities: usize,
    multigraph: bool,
}

impl Graph {
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Graph {
        assert!(n <= u32::MAX as usize, "node ids are 32-bit");
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut acc = 0;
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0u32; acc];
        for &(u, v) in edges {
            targets[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            targets[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        Graph {
            offsets,
            targets,
            community: vec![0; n],
            num_communities: 1,
            multigraph: false,
        }
    }

    /// Marks the graph as a multigraph realization (parallel edges and
    /// self-loops are expected, not just tolerated).
    pub fn into_multigraph(mut self) -> Self {
        self.multigraph = true;
        self
    }

    pub fn with_communities(mut self, labels: Vec<u32>) -> crate::Result<Self> {
        if labels.len() != self.node_count() {
            return Err(crate::Error::invalid(
                "communities",
                format!("{} labels for {} nodes", labels.len(), self.node_count()),
            ));
        }
        self.num_communities = labels.iter().max().map_or(1, |&m| m as usize + 1);
        self.community = labels;
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn is_multigraph(&self) -> bool {
        self.multigraph
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn slots(&self, v: usize) -> Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    #[inline]
    pub fn target(&self, slot: usize) -> u32 {
        self.targets[slot]
    }

    pub fn slot_count(&self) -> usize {
        self.targets.len()
    }

    pub fn degrees(&self) -> Vec<u32> {
        (0..self.node_count()).map(|v| self.degree(v) as u32).collect()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count() == 0 {
            0.0
        } else {
            self.targets.len() as f64 / self.node_count() as f64
        }
    }

    #[inline]
    pub fn community(&self, v: usize) -> u32 {
        self.community[v]
    }

    pub fn communities(&self) -> &[u32] {
        &self.community
    }

    pub fn num_communities(&self) -> usize {
        self.num_communities
    }

    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_communities];
        for &c in &self.community {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// Recovers the edge list, each undirected edge once.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let ids = self.edge_ids();
        let mut out = vec![(0, 0); self.edge_count()];
        for v in 0..self.node_count() {
            for s in self.slots(v) {
                let t = self.targets[s];
                if (v as u32) <= t {
                    out[ids[s] as usize] = (v as u32, t);
                }
            }
        }
        out
    }

    /// Maps every slot to the id of the undirected edge it belongs to; the
    /// two slots of an edge share an id.
    ///
    /// The k-th slot of `u` pointing at `v` is paired with the k-th slot of
    /// `v` pointing at `u`; the slots of a self-loop are paired
    /// consecutively.
    pub fn edge_ids(&self) -> Vec<u32> {
        let mut keyed: Vec<(u32, u32, usize)> = Vec::with_capacity(self.targets.len());
        for v in 0..self.node_count() {
            for s in self.slots(v) {
                let t = self.targets[s];
                let (a, b) = if (v as u32) <= t { (v as u32, t) } else { (t, v as u32) };
                keyed.push((a, b, s));
            }
        }
        keyed.sort_unstable();
        let mut ids = vec![0u32; self.targets.len()];
        let mut next = 0u32;
        let mut i = 0;
        while i < keyed.len() {
            let (a, b, _) = keyed[i];
            let mut j = i;
            while j < keyed.len() && keyed[j].0 == a && keyed[j].1 == b {
                j += 1;
            }
            let group = &keyed[i..j];
            let half = group.len() / 2;
            if a == b {
                for pair in group.chunks(2) {
                    ids[pair[0].2] = next;
                    ids[pair[1].2] = next;
                    next += 1;
                }
            } else {
                // slots of the lower node id sort first
                for k in 0..half {
                    ids[group[k].2] = next;
                    ids[group[half + k].2] = next;
                    next += 1;
                }
            }
            i = j;
        }
        ids
    }

    /// Number of self-loops and of surplus parallel edges.
    pub fn multiplicity_defects(&self) -> (usize, usize) {
        let mut loops = 0;
        let mut parallel = 0;
        let mut seen: Vec<u32> = Vec::new();
        for v in 0..self.node_count() {
            seen.clear();
            seen.extend(self.neighbors(v).iter().copied().filter(|&t| t as usize >= v));
            seen.sort_unstable();
            let mut k = 0;
            while k < seen.len() {
                let t = seen[k];
                let mut j = k;
                while j < seen.len() && seen[j] == t {
                    j += 1;
                }
                let count = j - k;
                if t as usize == v {
                    loops += count / 2;
                    parallel += (count / 2).saturating_sub(1);
                } else {
                    parallel += count - 1;
                }
                k = j;
            }
        }
        (loops, parallel)
    }

    /// Drops self-loops and collapses parallel edges.
    pub fn simplify(&self) -> Graph {
        let mut edges: Vec<(u32, u32)> = self
            .edges()
            .into_iter()
            .filter(|&(u, v)| u != v)
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let mut g = Graph::from_edges(self.node_count(), &edges);
        g.community = self.community.clone();
        g.num_communities = self.num_communities;
        g
    }

    /// `j` appears in `i`'s list exactly as often as `i` in `j`'s.
    pub fn is_symmetric(&self) -> bool {
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(self.targets.len());
        for v in 0..self.node_count() {
            for &t in self.neighbors(v) {
                if t as usize != v {
                    pairs.push((v as u32, t));
                }
            }
        }
        let mut rev: Vec<(u32, u32)> = pairs.iter().map(|&(a, b)| (b, a)).collect();
        pairs.sort_unstable();
        rev.sort_unstable();
        let loops_even = (0..self.node_count())
            .all(|v| self.neighbors(v).iter().filter(|&&t| t as usize == v).count() % 2 == 0);
        pairs == rev && loops_even
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csr_basics() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 2), (1, 2)]);
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.degrees(), vec![1, 3, 4, 0]);
        assert_eq!(g.degrees().iter().sum::<u32>() as usize, 2 * g.edge_count());
        assert!(g.is_symmetric());
        assert_eq!(g.multiplicity_defects(), (1, 1));
        let s = g.simplify();
        assert_eq!(s.edge_count(), 2);
        assert_eq!(s.multiplicity_defects(), (0, 0));
    }

    #[test]
    fn edge_ids_pair_the_two_slots() {
        let edges = [(0, 1), (1, 2), (2, 2), (1, 2), (3, 0)];
        let g = Graph::from_edges(4, &edges);
        let ids = g.edge_ids();
        let mut count = vec![0; g.edge_count()];
        for &id in &ids {
            count[id as usize] += 1;
        }
        assert!(count.iter().all(|&c| c == 2));
        let mut back = g.edges();
        back.sort_unstable();
        let mut want: Vec<(u32, u32)> = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        want.sort_unstable();
        assert_eq!(back, want);
        // both slots of an id connect the same endpoints
        for v in 0..g.node_count() {
            for s in g.slots(v) {
                let t = g.target(s) as usize;
                let partner = g.slots(t).find(|&s2| s2 != s && ids[s2] == ids[s]);
                assert!(partner.is_some() || t == v);
            }
        }
    }

    #[test]
    fn community_labels() {
        let g = Graph::from_edges(3, &[(0, 1)]).with_communities(vec![0, 1, 1]).unwrap();
        assert_eq!(g.num_communities(), 2);
        assert_eq!(g.community_sizes(), vec![1, 2]);
        assert!(Graph::from_edges(3, &[]).with_communities(vec![0]).is_err());
    }
}
