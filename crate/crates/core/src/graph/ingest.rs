use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

/// What ingestion dropped or renamed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestReport {
    pub nodes: usize,
    pub edges: usize,
    pub duplicates: usize,
    pub self_loops: usize,
    /// `original_ids[i]` is the file id of dense node `i` (ascending).
    pub original_ids: Vec<u64>,
}

/// Reads a whitespace-separated edge list into a simple graph. Ids are
/// remapped densely in ascending order of the original id.
pub fn ingest_edge_list(path: &Path) -> Result<(Graph, IngestReport)> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut self_loops = 0;
    let bad = |line: usize, reason: String| Error::File {
        path: path.to_path_buf(),
        line,
        reason,
    };
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(bad(idx + 1, format!("expected two ids, got `{trimmed}`")));
        };
        let parse = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| bad(idx + 1, format!("`{s}` is not a nonnegative integer id")))
        };
        let (u, v) = (parse(a)?, parse(b)?);
        if u == v {
            self_loops += 1;
            continue;
        }
        raw.push((u.min(v), u.max(v)));
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() > u32::MAX as usize {
        return Err(Error::invalid("edge list", "more than 2^32 distinct nodes"));
    }
    let dense = |id: u64| ids.binary_search(&id).expect("id collected above") as u32;

    let total = raw.len();
    raw.sort_unstable();
    raw.dedup();
    let duplicates = total - raw.len();
    let edges: Vec<(u32, u32)> = raw.iter().map(|&(u, v)| (dense(u), dense(v))).collect();
    let graph = Graph::from_edges(ids.len(), &edges);
    if duplicates > 0 || self_loops > 0 {
        log::warn!(
            "{}: collapsed {duplicates} duplicate edges, dropped {self_loops} self-loops",
            path.display()
        );
    }
    let report = IngestReport {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        duplicates,
        self_loops,
        original_ids: ids,
    };
    Ok((graph, report))
}

/// Writes `dense_id original_id` lines.
pub fn write_id_map(path: &Path, report: &IngestReport) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# dense_id original_id")?;
    for (i, id) in report.original_ids.iter().enumerate() {
        writeln!(out, "{i} {id}")?;
    }
    out.flush()?;
    Ok(())
}

/// Writes one `u v` line per edge, `u <= v`.
pub fn write_edge_list(path: &Path, g: &Graph) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()?;
    Ok(())
}
