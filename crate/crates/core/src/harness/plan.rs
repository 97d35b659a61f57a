use std::path::Path;
use std::sync::Arc;

use toml::{Table, Value};

use crate::engine::{parse_threshold_rule, Dynamics};
use crate::error::{Error, Result};
use crate::graph::{graph_models, GraphModel, ModelLaw};
use crate::influence::InfluenceSpec;
use crate::registry::Params;

/// Default work budget, in node-plus-edge visits summed over all runs.
pub const DEFAULT_BUDGET: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub model: Arc<dyn GraphModel>,
    pub dynamics: Dynamics,
    /// Cascade process name in the process registry.
    pub process: String,
    pub grid: Vec<usize>,
    pub runs: usize,
    pub seed: u64,
    /// Draw a new graph for every run; ignored for file-backed graphs.
    pub fresh_graph: bool,
    /// Predictor name; chosen from the model law when absent.
    pub predictor: Option<String>,
    /// Extra bisection points placed around the transition.
    pub refine_rounds: usize,
    pub workers: usize,
    pub budget: f64,
}

/// `points` log-spaced integers from `from` to `to`, rounded, duplicates dropped.
pub fn log_grid(from: usize, to: usize, points: usize) -> Result<Vec<usize>> {
    if from == 0 || to < from || points == 0 {
        return Err(Error::invalid(
            "grid",
            format!("need 1 <= from <= to and points >= 1, got {from}..{to} x {points}"),
        ));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let (lo, hi) = ((from as f64).ln(), (to as f64).ln());
    let mut grid: Vec<usize> = (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp().round() as usize)
        .collect();
    grid.dedup();
    Ok(grid)
}

impl SweepPlan {
    pub fn new(model: Arc<dyn GraphModel>, dynamics: Dynamics, grid: Vec<usize>) -> Self {
        SweepPlan {
            model,
            dynamics,
            process: "node".to_string(),
            grid,
            runs: 200,
            seed: 1,
            fresh_graph: true,
            predictor: None,
            refine_rounds: 0,
            workers: 1,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::invalid("sweep plan", "runs must be at least 1"));
        }
        if self.grid.is_empty() {
            return Err(Error::invalid("sweep plan", "grid is empty"));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sweep plan", "grid must be strictly increasing"));
        }
        let n = self.model.node_count();
        if let Some(&last) = self.grid.last() {
            if last > n {
                return Err(Error::invalid(
                    "sweep plan",
                    format!("seed count {last} exceeds n = {n}"),
                ));
            }
        }
        Ok(())
    }

    /// Node plus expected edge count, times the number of runs.
    pub fn work_estimate(&self) -> f64 {
        let law = self.model.law();
        let n = law.node_count() as f64;
        let edges = match &law {
            ModelLaw::Gnp { p, .. } => n * (n - 1.0) / 2.0 * p,
            ModelLaw::Gnm { m, .. } => *m as f64,
            ModelLaw::Degrees { law, .. } => n * law.iter().map(|&(d, p)| d as f64 * p).sum::<f64>() / 2.0,
            ModelLaw::Block { sizes, probs } => {
                let mut total = 0.0;
                for a in 0..sizes.len() {
                    for b in a..sizes.len() {
                        let pairs = if a == b {
                            sizes[a] as f64 * (sizes[a] as f64 - 1.0) / 2.0
                        } else {
                            sizes[a] as f64 * sizes[b] as f64
                        };
                        total += pairs * probs[a][b];
                    }
                }
                total
            }
        };
        let points = (self.grid.len() + self.refine_rounds) as f64;
        points * self.runs as f64 * (n + edges)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::File {
            path: path.to_path_buf(),
            line: 0,
            reason: e.to_string(),
        })?;
        Self::parse(&src, path)
    }

    /// Parses a plan with `[graph]`, `[dynamics]` and `[sweep]` sections.
    /// Relative `path`/`degree_file` entries resolve against the plan's directory.
    pub fn parse(src: &str, path: &Path) -> Result<Self> {
        let at = |line: usize, reason: String| Error::File {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let table: Table = src.parse().map_err(|e: toml::de::Error| {
            let line = e.span().map(|s| line_of_offset(src, s.start)).unwrap_or(1);
            at(line, e.message().to_string())
        })?;
        for key in table.keys() {
            if !["graph", "dynamics", "sweep"].contains(&key.as_str()) {
                return Err(at(section_line(src, key), format!("unknown section [{key}]")));
            }
        }
        let section = |name: &str| -> Result<Table> {
            match table.get(name) {
                Some(Value::Table(t)) => Ok(t.clone()),
                Some(_) => Err(at(section_line(src, name), format!("{name} must be a table"))),
                None => Err(at(1, format!("missing [{name}] section"))),
            }
        };
        let key_err = |sec: &str, key: &str, e: Error| at(key_line(src, sec, key), e.to_string());

        let graph = section("graph")?;
        let model_name = match graph.get("model") {
            Some(Value::String(s)) => s.clone(),
            _ => return Err(at(section_line(src, "graph"), "graph.model must be a string".into())),
        };
        let base = path.parent().unwrap_or(Path::new(""));
        let mut params = Params::new();
        for (key, value) in &graph {
            if key == "model" {
                continue;
            }
            let mut raw = param_string(value)
                .ok_or_else(|| at(key_line(src, "graph", key), format!("unsupported value for {key}")))?;
            if (key == "path" || key == "degree_file") && Path::new(&raw).is_relative() {
                raw = base.join(&raw).to_string_lossy().into_owned();
            }
            params.insert(key, raw);
        }
        let model: Arc<dyn GraphModel> = Arc::from(
            graph_models()
                .create(&model_name, &params)
                .map_err(|e| key_err("graph", "model", e))?,
        );

        let dynamics_table = section("dynamics")?;
        let get_str = |t: &Table, sec: &str, key: &str| -> Result<Option<String>> {
            match t.get(key) {
                None => Ok(None),
                Some(Value::String(s)) => Ok(Some(s.clone())),
                Some(v) => param_string(v)
                    .map(Some)
                    .ok_or_else(|| at(key_line(src, sec, key), format!("{key} must be a string"))),
            }
        };
        for key in dynamics_table.keys() {
            if !["R", "W", "rule"].contains(&key.as_str()) {
                return Err(at(key_line(src, "dynamics", key), format!("unknown key dynamics.{key}")));
            }
        }
        let dynamics = match (
            get_str(&dynamics_table, "dynamics", "rule")?,
            get_str(&dynamics_table, "dynamics", "R")?,
        ) {
            (Some(_), Some(_)) => {
                return Err(at(key_line(src, "dynamics", "rule"), "give either rule or R, not both".into()))
            }
            (Some(rule), None) => Dynamics::DegreeRule(
                parse_threshold_rule(&rule).map_err(|e| key_err("dynamics", "rule", e))?.into(),
            ),
            (None, Some(r)) => {
                let w = get_str(&dynamics_table, "dynamics", "W")?.unwrap_or_else(|| "const:1".into());
                Dynamics::Influence(InfluenceSpec::parse(&r, &w).map_err(|e| key_err("dynamics", "R", e))?)
            }
            (None, None) => return Err(at(section_line(src, "dynamics"), "dynamics needs R or rule".into())),
        };

        let sweep = section("sweep")?;
        let int = |key: &str| -> Result<Option<u64>> {
            match sweep.get(key) {
                None => Ok(None),
                Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
                Some(Value::Float(f)) if *f >= 0.0 && f.fract() == 0.0 && *f < 9e15 => Ok(Some(*f as u64)),
                Some(_) => Err(at(key_line(src, "sweep", key), format!("{key} must be a nonnegative integer"))),
            }
        };
        const SWEEP_KEYS: [&str; 10] = [
            "grid", "grid_from", "grid_to", "grid_points", "runs", "seed", "fresh_graph", "process",
            "predictor", "refine_rounds",
        ];
        for key in sweep.keys() {
            if !SWEEP_KEYS.contains(&key.as_str()) {
                return Err(at(key_line(src, "sweep", key), format!("unknown key sweep.{key}")));
            }
        }
        let grid = match sweep.get("grid") {
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Integer(i) if *i >= 0 => Ok(*i as usize),
                    Value::Float(f) if *f >= 0.0 && f.fract() == 0.0 => Ok(*f as usize),
                    _ => Err(at(key_line(src, "sweep", "grid"), "grid entries must be nonnegative integers".into())),
                })
                .collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(at(key_line(src, "sweep", "grid"), "grid must be an array".into())),
            None => {
                let (Some(from), Some(to), Some(points)) = (int("grid_from")?, int("grid_to")?, int("grid_points")?) else {
                    return Err(at(
                        section_line(src, "sweep"),
                        "give grid = [...] or grid_from, grid_to and grid_points".into(),
                    ));
                };
                log_grid(from as usize, to as usize, points as usize).map_err(|e| key_err("sweep", "grid_from", e))?
            }
        };
        let mut plan = SweepPlan::new(model, dynamics, grid);
        if let Some(runs) = int("runs")? {
            plan.runs = runs as usize;
        }
        if let Some(seed) = int("seed")? {
            plan.seed = seed;
        }
        if let Some(rounds) = int("refine_rounds")? {
            plan.refine_rounds = rounds as usize;
        }
        match sweep.get("fresh_graph") {
            None => {}
            Some(Value::Boolean(b)) => plan.fresh_graph = *b,
            Some(_) => return Err(at(key_line(src, "sweep", "fresh_graph"), "fresh_graph must be true or false".into())),
        }
        if let Some(process) = get_str(&sweep, "sweep", "process")? {
            plan.process = process;
        }
        plan.predictor = get_str(&sweep, "sweep", "predictor")?;
        plan.validate().map_err(|e| {
            let key = if sweep.contains_key("grid") { "grid" } else if e.to_string().contains("runs") { "runs" } else { "grid_from" };
            key_err("sweep", key, e)
        })?;
        Ok(plan)
    }
}

fn param_string(value: &Value) -> Option<String> {
    Some(match value {
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) if f.fract() == 0.0 && f.abs() < 9e15 => format!("{}", *f as i64),
        Value::Float(f) => f.to_string(),
        Value::Boolean(b) => b.to_string(),
        Value::Array(items) if items.iter().all(|v| matches!(v, Value::Array(_))) && !items.is_empty() => items
            .iter()
            .map(param_string)
            .collect::<Option<Vec<_>>>()?
            .join(";"),
        Value::Array(items) => items.iter().map(param_string).collect::<Option<Vec<_>>>()?.join(","),
        _ => return None,
    })
}

fn line_of_offset(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

fn section_line(src: &str, section: &str) -> usize {
    let header = format!("[{section}]");
    src.lines()
        .position(|l| l.trim() == header)
        .map(|i| i + 1)
        .unwrap_or(1)
}

/// Line of `key = ...` inside `[section]`, falling back to the section header.
fn key_line(src: &str, section: &str, key: &str) -> usize {
    let mut current = String::new();
    for (i, line) in src.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') && t.ends_with(']') {
            current = t[1..t.len() - 1].trim().to_string();
        } else if current == section {
            if let Some(rest) = t.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return i + 1;
                }
            }
        }
    }
    section_line(src, section)
}
