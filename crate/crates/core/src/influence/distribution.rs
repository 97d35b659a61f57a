use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// Tolerance on the total probability mass of a distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A finite discrete law: distinct real atoms sorted ascending, each with
/// positive probability, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
}

impl DiscreteDistribution {
    /// Builds a distribution from `(value, probability)` pairs in any order.
    /// Zero-probability atoms are dropped so that `min`/`max` are the
    /// essential infimum and supremum.
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = atoms.into_iter().collect();
        for &(v, p) in &atoms {
            if !v.is_finite() {
                return Err(Error::invalid("distribution", format!("atom value {v} is not finite")));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(
                    "distribution",
                    format!("probability {p} of atom {v} is outside [0, 1]"),
                ));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::invalid(
                "distribution",
                format!("probabilities sum to {total}, not 1"),
            ));
        }
        atoms.retain(|a| a.1 > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("distribution", "atom values must be distinct"));
        }
        if atoms.is_empty() {
            return Err(Error::invalid("distribution", "no atoms"));
        }
        let mut acc = 0.0;
        let cumulative = atoms
            .iter()
            .map(|a| {
                acc += a.1;
                acc
            })
            .collect();
        Ok(DiscreteDistribution { atoms, cumulative })
    }

    pub fn constant(value: f64) -> Self {
        DiscreteDistribution {
            atoms: vec![(value, 1.0)],
            cumulative: vec![1.0],
        }
    }

    /// Uniform law on the integers `lo..=hi`.
    pub fn uniform_set(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::invalid("distribution", format!("empty integer range {lo}-{hi}")));
        }
        let k = (hi - lo + 1) as f64;
        Self::new((lo..=hi).map(|v| (v as f64, 1.0 / k)))
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn min(&self) -> f64 {
        self.atoms[0].0
    }

    pub fn max(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].0
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(v, p)| v * p).sum()
    }

    /// Probability of the atom at exactly `value` (zero if absent).
    pub fn prob(&self, value: f64) -> f64 {
        self.atoms
            .iter()
            .find(|a| a.0 == value)
            .map_or(0.0, |a| a.1)
    }

    pub fn is_constant(&self) -> bool {
        self.atoms.len() == 1
    }

    pub fn is_integer_valued(&self) -> bool {
        self.atoms.iter().all(|a| a.0.fract() == 0.0)
    }

    /// Draws one value. Constant laws return without touching `rng`.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.atoms.len() == 1 {
            return self.atoms[0].0;
        }
        let u: f64 = rng.random();
        let last = self.atoms.len() - 1;
        let idx = self.cumulative[..last]
            .iter()
            .position(|&c| u < c)
            .unwrap_or(last);
        self.atoms[idx].0
    }
}

impl FromStr for DiscreteDistribution {
    type Err = Error;

    /// Accepts `v1:p1,v2:p2,...`, `const:<v>` and `uniformset:<lo>-<hi>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let fail = |reason: &str| Error::Parse {
            what: "distribution",
            input: s.to_string(),
            reason: reason.to_string(),
        };
        if let Some(rest) = s.strip_prefix("const:") {
            let v: f64 = rest.trim().parse().map_err(|_| fail("bad constant"))?;
            if !v.is_finite() {
                return Err(fail("bad constant"));
            }
            return Ok(Self::constant(v));
        }
        if let Some(rest) = s.strip_prefix("uniformset:") {
            // the upper bound may itself be negative: split on the first '-' after a digit
            let rest = rest.trim();
            let split = rest
                .char_indices()
                .skip(1)
                .find(|&(_, c)| c == '-')
                .map(|(i, _)| i)
                .ok_or_else(|| fail("expected uniformset:<lo>-<hi>"))?;
            let lo: i64 = rest[..split].trim().parse().map_err(|_| fail("bad lower bound"))?;
            let hi: i64 = rest[split + 1..].trim().parse().map_err(|_| fail("bad upper bound"))?;
            return Self::uniform_set(lo, hi);
        }
        let mut atoms = Vec::new();
        for part in s.split(',') {
            let (v, p) = part
                .split_once(':')
                .ok_or_else(|| fail("expected value:probability pairs"))?;
            let v: f64 = v.trim().parse().map_err(|_| fail("bad atom value"))?;
            let p: f64 = p.trim().parse().map_err(|_| fail("bad atom probability"))?;
            atoms.push((v, p));
        }
        Self::new(atoms)
    }
}

impl fmt::Display for DiscreteDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, p)) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}:{p}")?;
        }
        Ok(())
    }
}
