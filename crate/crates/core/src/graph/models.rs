use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{ingest_edge_list, powerlaw_degree_sequence, read_degree_file, DegreeSequence, Graph};
use crate::error::{Error, Result};
use crate::registry::{parse_count, parse_f64, Params, Registry};
use crate::SimRng;

/// The law of a graph family, in the form the critical-size formulas use.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelLaw {
    Gnp { n: usize, p: f64 },
    Gnm { n: usize, m: usize },
    /// Empirical degree law `(d, p(d))` of a configuration model.
    Degrees { n: usize, law: Vec<(u32, f64)> },
    Block { sizes: Vec<usize>, probs: Vec<Vec<f64>> },
}

impl ModelLaw {
    pub fn node_count(&self) -> usize {
        match self {
            ModelLaw::Gnp { n, .. } | ModelLaw::Gnm { n, .. } | ModelLaw::Degrees { n, .. } => *n,
            ModelLaw::Block { sizes, .. } => sizes.iter().sum(),
        }
    }
}

/// A random (or fixed) graph family that can be realized on demand.
pub trait GraphModel: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn node_count(&self) -> usize;
    fn params(&self) -> Params;
    fn law(&self) -> ModelLaw;

    /// `Some((n, p))` when the engine should run on G(n,p) without building it.
    fn implicit_gnp(&self) -> Option<(usize, f64)> {
        None
    }

    /// Every call to [`generate`](Self::generate) yields the same graph.
    fn is_fixed(&self) -> bool {
        false
    }

    fn community_sizes(&self) -> Vec<usize> {
        vec![self.node_count()]
    }

    fn generate(&self, rng: &mut SimRng) -> Result<Graph>;
}

fn check_prob(what: &'static str, p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::invalid(what, format!("probability {p} is outside [0, 1]")))
    }
}

fn check_n(n: usize) -> Result<usize> {
    if n == 0 || n > u32::MAX as usize {
        Err(Error::invalid("graph", format!("node count {n} out of range")))
    } else {
        Ok(n)
    }
}

/// Calls `hit` for each index in `0..total` independently with probability
/// `p`, in increasing order, using geometric gaps.
fn bernoulli_indices(total: u64, p: f64, rng: &mut SimRng, mut hit: impl FnMut(u64)) {
    if total == 0 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(hit);
        return;
    }
    let log_q = (-p).ln_1p();
    let mut k: u64 = 0;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
        let gap = (u.ln() / log_q).floor();
        if gap >= (total - k) as f64 {
            return;
        }
        k += gap as u64;
        hit(k);
        k += 1;
        if k >= total {
            return;
        }
    }
}

/// Independent edges inside and between consecutive id blocks.
fn block_edges(sizes: &[usize], probs: &[Vec<f64>], rng: &mut SimRng) -> Vec<(u32, u32)> {
    let mut starts = Vec::with_capacity(sizes.len());
    let mut acc = 0u64;
    for &s in sizes {
        starts.push(acc);
        acc += s as u64;
    }
    let mut edges = Vec::new();
    for a in 0..sizes.len() {
        let (sa, na) = (starts[a], sizes[a] as u64);
        // pairs (v, w) with w < v, row v holding v entries
        let mut row = 1u64;
        let mut row_start = 0u64;
        bernoulli_indices(na * na.saturating_sub(1) / 2, probs[a][a], rng, |k| {
            while k >= row_start + row {
                row_start += row;
                row += 1;
            }
            edges.push(((sa + row) as u32, (sa + k - row_start) as u32));
        });
        for b in a + 1..sizes.len() {
            let (sb, nb) = (starts[b], sizes[b] as u64);
            bernoulli_indices(na * nb, probs[a][b], rng, |k| {
                edges.push(((sa + k / nb) as u32, (sb + k % nb) as u32));
            });
        }
    }
    edges
}

fn block_labels(sizes: &[usize]) -> Vec<u32> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(k, &s)| std::iter::repeat_n(k as u32, s))
        .collect()
}

/// Uniform perfect matching of half-edges. The degree sum must be even.
fn pair_half_edges(degrees: &[u32], rng: &mut SimRng) -> Graph {
    let mut stubs: Vec<u32> = Vec::with_capacity(degrees.iter().map(|&d| d as usize).sum());
    for (v, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(v as u32, d as usize));
    }
    debug_assert!(stubs.len() % 2 == 0);
    stubs.shuffle(rng);
    let edges: Vec<(u32, u32)> = stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    Graph::from_edges(degrees.len(), &edges).into_multigraph()
}

/// G(n,p) consumed by the engine through deferred decisions.
#[derive(Debug, Clone)]
pub struct ErdosRenyiImplicit {
    pub n: usize,
    pub p: f64,
}

impl ErdosRenyiImplicit {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        Ok(ErdosRenyiImplicit {
            n: check_n(n)?,
            p: check_prob("gnp-implicit", p)?,
        })
    }
}

impl GraphModel for ErdosRenyiImplicit {
    fn name(&self) -> &'static str {
        "gnp-implicit"
    }
    fn node_count(&self) -> usize {
        self.n
    }
    fn params(&self) -> Params {
        Params::new().with("n", self.n).with("p", self.p)
    }
    fn law(&self) -> ModelLaw {
        ModelLaw::Gnp { n: self.n, p: self.p }
    }
    fn implicit_gnp(&self) -> Option<(usize, f64)> {
        Some((self.n, self.p))
    }
    fn generate(&self, _rng: &mut SimRng) -> Result<Graph> {
        Err(Error::invalid(
            "graph",
            "gnp-implicit is implicit-only; it is never materialized (use `gnp`)",
        ))
    }
}

#[derive(Debug, Clone)]
pub struct ErdosRenyi {
    pub n: usize,
    pub p: f64,
}

impl ErdosRenyi {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        Ok(ErdosRenyi {
            n: check_n(n)?,
            p: check_prob("gnp", p)?,
        })
    }
}

impl GraphModel for ErdosRenyi {
    fn name(&self) -> &'static str {
        "gnp"
    }
    fn node_count(&self) -> usize {
        self.n
    }
    fn params(&self) -> Params {
        Params::new().with("n", self.n).with("p", self.p)
    }
    fn law(&self) -> ModelLaw {
        ModelLaw::Gnp { n: self.n, p: self.p }
    }
    fn generate(&self, rng: &mut SimRng) -> Result<Graph> {
        let edges = block_edges(&[self.n], &[vec![self.p]], rng);
        Ok(Graph::from_edges(self.n, &edges))
    }
}

/// `m` edges, each with two independent uniform endpoints.
#[derive(Debug, Clone)]
pub struct GnmMultigraph {
    pub n: usize,
    pub m: usize,
}

impl GnmMultigraph {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        Ok(GnmMultigraph { n: check_n(n)?, m })
    }
}

impl GraphModel for GnmMultigraph {
    fn name(&self) -> &'static str {
        "gnm"
    }
    fn node_count(&self) -> usize {
        self.n
    }
    fn params(&self) -> Params {
        Params::new().with("n", self.n).with("m", self.m)
    }
    fn law(&self) -> ModelLaw {
        ModelLaw::Gnm { n: self.n, m: self.m }
    }
    fn generate(&self, rng: &mut SimRng) -> Result<Graph> {
        let n = self.n as u32;
        let edges: Vec<(u32, u32)> = (0..self.m)
            .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
            .collect();
        Ok(Graph::from_edges(self.n, &edges).into_multigraph())
    }
}

#[derive(Debug, Clone)]
pub struct ConfigModel {
    degrees: DegreeSequence,
}

impl ConfigModel {
    /// An odd degree sum loses one half-edge from the first node of maximum
    /// degree.
    pub fn new(degrees: DegreeSequence) -> Result<Self> {
        check_n(degrees.len())?;
        let mut d = degrees.degrees().to_vec();
        if degrees.sum() % 2 == 1 {
            let max = degrees.max();
            let v = d.iter().position(|&x| x == max).expect("nonempty");
            d[v] -= 1;
            log::warn!("odd degree sum; dropped one half-edge from node {v} (degree {max})");
        }
        Ok(ConfigModel {
            degrees: DegreeSequence::new(d)?,
        })
    }

    /// The sequence actually realized (after any odd-sum correction).
    pub fn degrees(&self) -> &DegreeSequence {
        &self.degrees
    }
}

impl GraphModel for ConfigModel {
    fn name(&self) -> &'static str {
        "config"
    }
    fn node_count(&self) -> usize {
        self.degrees.len()
    }
    fn params(&self) -> Params {
        Params::new()
            .with("n", self.degrees.len())
            .with("d_bar", self.degrees.mean())
            .with("d_max", self.degrees.max())
    }
    fn law(&self) -> ModelLaw {
        ModelLaw::Degrees {
            n: self.degrees.len(),
            law: self.degrees.distribution(),
        }
    }
    fn generate(&self, rng: &mut SimRng) -> Result<Graph> {
        Ok(pair_half_edges(self.degrees.degrees(), rng))
    }
}

/// Configuration model over the deterministic power-law sequence.
#[derive(Debug, Clone)]
pub struct PowerLawConfig {
    pub n: usize,
    pub beta: f64,
    pub d_min: u32,
    pub d_max: u32,
    inner: ConfigModel,
}

impl PowerLawConfig {
    pub fn new(n: usize, beta: f64, d_min: u32, d_max: u32) -> Result<Self> {
        let seq = powerlaw_degree_sequence(check_n(n)?, beta, d_min, d_max)?;
        Ok(PowerLawConfig {
            n,
            beta,
            d_min,
            d_max,
            inner: ConfigModel::new(seq)?,
        })
    }

    pub fn degrees(&self) -> &DegreeSequence {
        self.inner.degrees()
    }
}

impl GraphModel for PowerLawConfig {
    fn name(&self) -> &'static str {
        "powerlaw"
    }
    fn node_count(&self) -> usize {
        self.n
    }
    fn params(&self) -> Params {
        Params::new()
            .with("n", self.n)
            .with("beta", self.beta)
            .with("d_min", self.d_min)
            .with("d_max", self.d_max)
    }
    fn law(&self) -> ModelLaw {
        self.inner.law()
    }
    fn generate(&self, rng: &mut SimRng) -> Result<Graph> {
        self.inner.generate(rng)
    }
}

/// Stochastic block model; community `k` holds a contiguous id range.
#[derive(Debug, Clone)]
pub struct BlockModel {
    pub sizes: Vec<usize>,
    pub probs: Vec<Vec<f64>>,
}

impl BlockModel {
    pub fn new(sizes: Vec<usize>, probs: Vec<Vec<f64>>) -> Result<Self> {
        let k = sizes.len();
        if k == 0 || sizes.contains(&0) {
            return Err(Error::invalid("block model", "communities must be nonempty"));
        }
        check_n(sizes.iter().sum())?;
        if probs.len() != k || probs.iter().any(|row| row.len() != k) {
            return Err(Error::invalid(
                "block model",
                format!("probability matrix must be {k}x{k}"),
            ));
        }
        for a in 0..k {
            for b in 0..k {
                check_prob("block model", probs[a][b])?;
                if probs[a][b] != probs[b][a] {
                    return Err(Error::invalid(
                        "block model",
                        format!("matrix is not symmetric at ({a}, {b})"),
                    ));
                }
            }
        }
        Ok(BlockModel { sizes, probs })
    }

    /// Two-level matrix: `p_in` on the diagonal, `p_out` elsewhere.
    pub fn planted(sizes: Vec<usize>, p_in: f64, p_out: f64) -> Result<Self> {
        let k = sizes.len();
        let probs = (0..k)
            .map(|a| (0..k).map(|b| if a == b { p_in } else { p_out }).collect())
            .collect();
        BlockModel::new(sizes, probs)
    }
}

impl GraphModel for BlockModel {
    fn name(&self) -> &'static str {
        "block"
    }
    fn node_count(&self) -> usize {
        self.sizes.iter().sum()
    }
    fn params(&self) -> Params {
        Params::new()
            .with("sizes", join(&self.sizes, ","))
            .with("p", format_matrix(&self.probs))
    }
    fn law(&self) -> ModelLaw {
        ModelLaw::Block {
            sizes: self.sizes.clone(),
            probs: self.probs.clone(),
        }
    }
    fn community_sizes(&self) -> Vec<usize> {
        self.sizes.clone()
    }
    fn generate(&self, rng: &mut SimRng) -> Result<Graph> {
        let edges = block_edges(&self.sizes, &self.probs, rng);
        Graph::from_edges(self.node_count(), &edges).with_communities(block_labels(&self.sizes))
    }
}

/// A graph read once from an edge-list file.
#[derive(Debug, Clone)]
pub struct EdgeListFile {
    pub path: PathBuf,
    graph: Arc<Graph>,
}

impl EdgeListFile {
    pub fn load(path: &Path) -> Result<Self> {
        let (graph, report) = ingest_edge_list(path)?;
        log::info!(
            "{}: {} nodes, {} edges",
            path.display(),
            report.nodes,
            report.edges
        );
        Ok(EdgeListFile {
            path: path.to_path_buf(),
            graph: Arc::new(graph),
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }
}

impl GraphModel for EdgeListFile {
    fn name(&self) -> &'static str {
        "edgelist"
    }
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }
    fn params(&self) -> Params {
        Params::new().with("path", self.path.display())
    }
    fn law(&self) -> ModelLaw {
        let seq = DegreeSequence::new(self.graph.degrees()).expect("ingested graphs are nonempty");
        ModelLaw::Degrees {
            n: self.graph.node_count(),
            law: seq.distribution(),
        }
    }
    fn is_fixed(&self) -> bool {
        true
    }
    fn generate(&self, _rng: &mut SimRng) -> Result<Graph> {
        Ok((*self.graph).clone())
    }
}

/// Configuration-model multigraph over `g`'s degree sequence.
pub fn matched_config_model(g: &Graph, rng: &mut SimRng) -> Graph {
    let degrees = g.degrees();
    debug_assert!(degrees.iter().map(|&d| d as u64).sum::<u64>() % 2 == 0);
    pair_half_edges(&degrees, rng)
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn format_matrix(m: &[Vec<f64>]) -> String {
    m.iter().map(|row| join(row, ",")).collect::<Vec<_>>().join(";")
}

fn parse_list<T>(key: &str, raw: &str, item: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    raw.split(',').map(|s| item(key, s.trim())).collect()
}

fn parse_matrix(raw: &str) -> Result<Vec<Vec<f64>>> {
    raw.split(';').map(|row| parse_list("p", row, parse_f64)).collect()
}

fn parse_degree(key: &str, raw: &str) -> Result<u32> {
    let d = parse_count(key, raw)?;
    u32::try_from(d).map_err(|_| Error::invalid("degree", format!("{d} is too large")))
}

/// `m` from either `m` or a target mean degree `d_bar` (m = n d_bar / 2).
fn edge_count(p: &Params, n: usize) -> Result<usize> {
    if p.contains("m") {
        p.usize("m")
    } else {
        let d = p.f64("d_bar")?;
        if d < 0.0 {
            return Err(Error::invalid("gnm", "d_bar must be nonnegative"));
        }
        Ok((n as f64 * d / 2.0).round() as usize)
    }
}

/// `p` directly or from a mean degree `d_bar` (p = d_bar / n, so that `d_bar = n p`).
fn edge_prob(p: &Params, n: usize) -> Result<f64> {
    if p.contains("p") {
        p.f64("p")
    } else {
        Ok(p.f64("d_bar")? / n.max(1) as f64)
    }
}

/// All graph families, by name.
pub fn graph_models() -> Registry<dyn GraphModel> {
    let mut reg: Registry<dyn GraphModel> = Registry::new("graph model");
    reg.register(
        "gnp-implicit",
        "G(n,p) with deferred edge decisions: n, p | d_bar",
        |p| {
            let n = p.usize("n")?;
            Ok(Box::new(ErdosRenyiImplicit::new(n, edge_prob(p, n)?)?))
        },
    );
    reg.register("gnp", "materialized G(n,p): n, p | d_bar", |p| {
        let n = p.usize("n")?;
        Ok(Box::new(ErdosRenyi::new(n, edge_prob(p, n)?)?))
    });
    reg.register(
        "gnm",
        "multigraph with m uniform edges: n, m | d_bar",
        |p| {
            let n = p.usize("n")?;
            Ok(Box::new(GnmMultigraph::new(n, edge_count(p, n)?)?))
        },
    );
    reg.register(
        "config",
        "configuration model: degrees=d1,d2,... | degree_file=path",
        |p| {
            let seq = match (p.get("degrees"), p.get("degree_file")) {
                (Some(list), None) => DegreeSequence::new(parse_list("degrees", list, parse_degree)?)?,
                (None, Some(path)) => read_degree_file(Path::new(path))?,
                _ => {
                    return Err(Error::invalid(
                        "config",
                        "give exactly one of `degrees` or `degree_file`",
                    ))
                }
            };
            Ok(Box::new(ConfigModel::new(seq)?))
        },
    );
    reg.register(
        "powerlaw",
        "configuration model, power-law degrees: n, beta, d_min, d_max",
        |p| {
            Ok(Box::new(PowerLawConfig::new(
                p.usize("n")?,
                p.f64("beta")?,
                parse_degree("d_min", p.require("d_min")?)?,
                parse_degree("d_max", p.require("d_max")?)?,
            )?))
        },
    );
    reg.register(
        "block",
        "block model: sizes=n1,n2,..., p=row;row | p_in, p_out",
        |p| {
            let sizes = parse_list("sizes", p.require("sizes")?, parse_count)?;
            if p.contains("p") {
                Ok(Box::new(BlockModel::new(sizes, parse_matrix(p.require("p")?)?)?))
            } else {
                Ok(Box::new(BlockModel::planted(
                    sizes,
                    p.f64("p_in")?,
                    p.f64("p_out")?,
                )?))
            }
        },
    );
    reg.register("edgelist", "graph read from an edge-list file: path", |p| {
        Ok(Box::new(EdgeListFile::load(Path::new(p.require("path")?))?))
    });
    reg
}
