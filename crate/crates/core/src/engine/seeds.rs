use std::fmt;
use std::str::FromStr;

use rand::seq::index;

use super::Substrate;
use crate::error::{Error, Result};
use crate::registry::parse_count;
use crate::SimRng;

/// How the initially active set is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedSpec {
    /// `a` nodes uniformly at random.
    Uniform(usize),
    /// `a_k` nodes uniformly at random inside community `k`.
    PerCommunity(Vec<usize>),
    Explicit(Vec<u32>),
}

impl SeedSpec {
    pub fn total(&self) -> usize {
        match self {
            SeedSpec::Uniform(a) => *a,
            SeedSpec::PerCommunity(a) => a.iter().sum(),
            SeedSpec::Explicit(list) => list.len(),
        }
    }

    pub fn resolve(&self, substrate: &Substrate<'_>, rng: &mut SimRng) -> Result<Vec<u32>> {
        let n = substrate.node_count();
        match self {
            SeedSpec::Uniform(a) => {
                if *a > n {
                    return Err(Error::invalid("seeds", format!("{a} seeds for {n} nodes")));
                }
                Ok(index::sample(rng, n, *a).into_iter().map(|v| v as u32).collect())
            }
            SeedSpec::PerCommunity(counts) => {
                let members = match substrate {
                    Substrate::Explicit(g) if g.num_communities() == counts.len() => {
                        let mut m: Vec<Vec<u32>> = vec![Vec::new(); counts.len()];
                        for (v, &c) in g.communities().iter().enumerate() {
                            m[c as usize].push(v as u32);
                        }
                        m
                    }
                    Substrate::ImplicitGnp { .. } if counts.len() == 1 => {
                        return SeedSpec::Uniform(counts[0]).resolve(substrate, rng)
                    }
                    _ => {
                        return Err(Error::invalid(
                            "seeds",
                            format!(
                                "{} per-community counts for {} communities",
                                counts.len(),
                                substrate.num_communities()
                            ),
                        ))
                    }
                };
                let mut out = Vec::with_capacity(self.total());
                for (k, (&a, nodes)) in counts.iter().zip(&members).enumerate() {
                    if a > nodes.len() {
                        return Err(Error::invalid(
                            "seeds",
                            format!("{a} seeds for community {k} of size {}", nodes.len()),
                        ));
                    }
                    out.extend(index::sample(rng, nodes.len(), a).into_iter().map(|i| nodes[i]));
                }
                Ok(out)
            }
            SeedSpec::Explicit(list) => {
                super::seed_mask(n, list)?;
                Ok(list.clone())
            }
        }
    }
}

impl FromStr for SeedSpec {
    type Err = Error;

    /// `120` (uniform), `60,60` (per community) or `nodes:3,17,42`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(list) = s.strip_prefix("nodes:") {
            let mut nodes = Vec::new();
            for item in list.split(',').filter(|x| !x.trim().is_empty()) {
                let v = parse_count("seed node", item.trim())?;
                nodes.push(u32::try_from(v).map_err(|_| Error::invalid("seeds", "node id too large"))?);
            }
            let mut sorted = nodes.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid("seeds", "explicit list has duplicates"));
            }
            return Ok(SeedSpec::Explicit(nodes));
        }
        if s.contains(',') {
            let counts = s
                .split(',')
                .map(|x| parse_count("seed count", x.trim()))
                .collect::<Result<Vec<_>>>()?;
            return Ok(SeedSpec::PerCommunity(counts));
        }
        Ok(SeedSpec::Uniform(parse_count("seed count", s)?))
    }
}

impl fmt::Display for SeedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: Vec<String>| xs.join(",");
        match self {
            SeedSpec::Uniform(a) => write!(f, "{a}"),
            SeedSpec::PerCommunity(a) => write!(f, "{}", join(a.iter().map(|x| x.to_string()).collect())),
            SeedSpec::Explicit(v) => write!(f, "nodes:{}", join(v.iter().map(|x| x.to_string()).collect())),
        }
    }
}
