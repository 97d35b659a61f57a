use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<u32>,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<u32>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::invalid("degree sequence", "empty"));
        }
        Ok(DegreeSequence { degrees })
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.degrees.iter().map(|&d| d as u64).sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() as f64 / self.degrees.len() as f64
    }

    pub fn max(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn min(&self) -> u32 {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    /// Empirical law `p(d)`, as `(d, fraction of nodes)` ascending in `d`.
    pub fn distribution(&self) -> Vec<(u32, f64)> {
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for &d in &self.degrees {
            *counts.entry(d).or_default() += 1;
        }
        let n = self.degrees.len() as f64;
        counts.into_iter().map(|(d, c)| (d, c as f64 / n)).collect()
    }
}

/// Deterministic power-law degree sequence: node `i` (1-based) receives
/// `inf{d : 1 - F(d) < i/n}` where `F` is the CDF of `p(d) ∝ d^-beta` on the
/// integers `d_min..=d_max`.
pub fn powerlaw_degree_sequence(
    n: usize,
    beta: f64,
    d_min: u32,
    d_max: u32,
) -> Result<DegreeSequence> {
    if n == 0 {
        return Err(Error::invalid("power-law sequence", "n must be positive"));
    }
    if d_min > d_max {
        return Err(Error::invalid(
            "power-law sequence",
            format!("d_min = {d_min} exceeds d_max = {d_max}"),
        ));
    }
    if !beta.is_finite() {
        return Err(Error::invalid("power-law sequence", "beta must be finite"));
    }
    if d_min == 0 && beta > 0.0 {
        return Err(Error::invalid(
            "power-law sequence",
            "d_min = 0 with positive beta has unbounded mass",
        ));
    }
    if beta > 1.0 {
        let cap = (n as f64).powf(1.0 / (beta - 1.0));
        if d_max as f64 > cap * (1.0 + 1e-9) {
            log::warn!("d_max = {d_max} exceeds n^(1/(beta-1)) = {cap:.1}");
        }
    }

    let weights: Vec<f64> = (d_min..=d_max)
        .map(|d| if d == 0 { 1.0 } else { (d as f64).powf(-beta) })
        .collect();
    let total: f64 = weights.iter().sum();
    // survival[k] = 1 - F(d_min + k)
    let mut survival = Vec::with_capacity(weights.len());
    let mut tail = total;
    for w in &weights {
        tail -= w;
        survival.push((tail / total).max(0.0));
    }
    if let Some(last) = survival.last_mut() {
        *last = 0.0;
    }

    let mut degrees = Vec::with_capacity(n);
    let mut k = 0usize;
    // walking i downward, the admissible level shrinks and the degree grows
    for i in (1..=n).rev() {
        let level = i as f64 / n as f64;
        while survival[k] >= level {
            k += 1;
        }
        degrees.push(d_min + k as u32);
    }
    degrees.reverse();
    DegreeSequence::new(degrees)
}

/// One nonnegative integer per line; blank lines and `#` comments skipped.
pub fn read_degree_file(path: &Path) -> Result<DegreeSequence> {
    let text = fs::read_to_string(path)?;
    let mut degrees = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let d: u32 = line.parse().map_err(|_| Error::File {
            path: path.to_path_buf(),
            line: idx + 1,
            reason: format!("`{line}` is not a nonnegative integer degree"),
        })?;
        degrees.push(d);
    }
    DegreeSequence::new(degrees)
}

pub fn write_degree_file(path: &Path, degrees: &[u32]) -> Result<()> {
    let mut out = io::BufWriter::new(fs::File::create(path)?);
    for d in degrees {
        writeln!(out, "{d}")?;
    }
    out.flush()?;
    Ok(())
}
