use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numeric::{binom_pmf, binom_sf, factorial};

use super::InfluenceSpec;

pub const DEFAULT_RHO_MAX: usize = 64;

/// Largest `p * t` accepted by [`pi_asymptotic`].
pub const ASYMPTOTIC_PT_LIMIT: f64 = 0.1;

// Partial sums are tracked on a fixed grid so that sums reached along
// different orders of the same atoms land on the same state.
const GRID: f64 = 1e9;
const MAX_MAGNITUDE: f64 = 1e6;

/// Activation probabilities `q_rho` of a node that has received `rho`
/// sequential influences, together with the derived `rho*` and `q_inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationProfile {
    pub rho_star: usize,
    /// `q[rho]` for `rho = 0..=rho_max`.
    pub q: Vec<f64>,
    pub q_infinity: f64,
    /// Whether `q_infinity` is a closed-form value rather than the lower
    /// bound `q[rho_max]`.
    pub q_infinity_exact: bool,
}

impl ActivationProfile {
    /// Profile of basic bootstrap percolation with integer threshold `r`
    /// (unit weights).
    pub fn basic(r: usize, rho_max: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::invalid("threshold", format!("r = {r} must be >= 2")));
        }
        if rho_max < r {
            return Err(Error::NoRhoStar { rho_max });
        }
        let q = (0..=rho_max).map(|rho| if rho >= r { 1.0 } else { 0.0 }).collect();
        Ok(ActivationProfile {
            rho_star: r,
            q,
            q_infinity: 1.0,
            q_infinity_exact: true,
        })
    }

    pub fn rho_max(&self) -> usize {
        self.q.len() - 1
    }

    pub fn q_rho_star(&self) -> f64 {
        self.q[self.rho_star]
    }

    /// `q_rho`, continued by `q_infinity` beyond the table.
    pub fn q_at(&self, rho: usize) -> f64 {
        self.q.get(rho).copied().unwrap_or(self.q_infinity)
    }

    /// True when the table has already reached `q_infinity`, so extending
    /// it by `q_infinity` is exact.
    pub fn saturated(&self) -> bool {
        self.q_infinity_exact && (self.q[self.rho_max()] - self.q_infinity).abs() <= 1e-12
    }
}

/// Computes `q_rho = P(sup_{m <= rho} W_1 + ... + W_m >= R)` exactly for
/// `rho = 0..=rho_max`.
///
/// For every threshold atom the law of the running sum is propagated step
/// by step; mass that reaches the threshold is moved into an absorbed sink,
/// and mass that can no longer reach it within `rho_max` steps is dropped.
pub fn activation_profile(spec: &InfluenceSpec, rho_max: usize) -> Result<ActivationProfile> {
    if rho_max < 2 {
        return Err(Error::invalid("rho_max", format!("{rho_max} must be >= 2")));
    }
    let weights = spec.weight.atoms();
    for &(v, _) in weights.iter().chain(spec.threshold.atoms()) {
        if v.abs() > MAX_MAGNITUDE {
            return Err(Error::invalid(
                "influence spec",
                format!("atom {v} exceeds the supported magnitude {MAX_MAGNITUDE}"),
            ));
        }
    }
    let w_keys: Vec<(i64, f64)> = weights.iter().map(|&(v, p)| (to_grid(v), p)).collect();
    let w_max = to_grid(spec.weight.max());

    let mut q = vec![0.0; rho_max + 1];
    for &(r, r_prob) in spec.threshold.atoms() {
        let r_key = to_grid(r);
        let mut states: BTreeMap<i64, f64> = BTreeMap::from([(0, 1.0)]);
        let mut absorbed = 0.0;
        for (m, slot) in q.iter_mut().enumerate().skip(1) {
            let remaining = (rho_max - m) as i64;
            let mut next: BTreeMap<i64, f64> = BTreeMap::new();
            for (&s, &mass) in &states {
                for &(w, wp) in &w_keys {
                    let s2 = s + w;
                    let mass2 = mass * wp;
                    if s2 >= r_key {
                        absorbed += mass2;
                    } else if s2 + remaining * w_max >= r_key {
                        *next.entry(s2).or_insert(0.0) += mass2;
                    }
                }
            }
            states = next;
            *slot += r_prob * absorbed;
        }
    }
    // ess inf R > ess sup W forces these, but rounding must not leak mass
    q[0] = 0.0;
    q[1] = 0.0;

    let rho_star = (2..=rho_max)
        .find(|&rho| q[rho] > 0.0)
        .ok_or(Error::NoRhoStar { rho_max })?;
    let (q_infinity, q_infinity_exact) = q_infinity(spec, &q);
    Ok(ActivationProfile {
        rho_star,
        q,
        q_infinity,
        q_infinity_exact,
    })
}

fn to_grid(v: f64) -> i64 {
    (v * GRID).round() as i64
}

/// Limit of `q_rho` as `rho -> inf`.
///
/// Exact when the weight mean is nonnegative (the walk is recurrent or
/// drifts upward, so every level is reached) or for the +-1 walk with a
/// single integer threshold `b` (gambler's ruin: `(z / (1 - z))^b`).
/// Otherwise the last table entry is returned as a lower bound.
pub fn q_infinity(spec: &InfluenceSpec, table: &[f64]) -> (f64, bool) {
    let w = &spec.weight;
    if w.mean() >= 0.0 {
        return (1.0, true);
    }
    let atoms = w.atoms();
    if atoms.len() == 2 && atoms[0].0 == -1.0 && atoms[1].0 == 1.0 {
        let th = spec.threshold.atoms();
        if th.len() == 1 && th[0].0.fract() == 0.0 {
            let z = atoms[1].1;
            return ((z / (1.0 - z)).powi(th[0].0 as i32), true);
        }
    }
    (table.last().copied().unwrap_or(0.0), false)
}

/// Activation probability at node-time `t` with edge probability `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiValue {
    pub value: f64,
    /// False when `q_rho` had to be extended past the table by an inexact
    /// or unsaturated `q_infinity`.
    pub exact: bool,
}

/// `pi(t) = sum_rho C(t, rho) p^rho (1-p)^(t-rho) q_rho`.
pub fn pi_exact(t: u64, p: f64, profile: &ActivationProfile) -> PiValue {
    let rho_max = profile.rho_max() as u64;
    let head = t.min(rho_max);
    let mut value: f64 = (profile.rho_star as u64..=head)
        .map(|rho| binom_pmf(t, rho, p) * profile.q[rho as usize])
        .sum();
    let mut exact = true;
    if t > rho_max {
        value += profile.q_infinity * binom_sf(t, rho_max + 1, p);
        exact = profile.saturated();
    }
    PiValue {
        value: value.clamp(0.0, 1.0),
        exact,
    }
}

/// Leading term `(p t)^rho* q_rho* / rho*!`, valid only while `p t` is small.
pub fn pi_asymptotic(t: u64, p: f64, profile: &ActivationProfile) -> Result<f64> {
    let pt = p * t as f64;
    if pt >= ASYMPTOTIC_PT_LIMIT {
        return Err(Error::OutOfRegime {
            pt,
            limit: ASYMPTOTIC_PT_LIMIT,
        });
    }
    let k = profile.rho_star;
    Ok(pt.powi(k as i32) * profile.q_rho_star() / factorial(k as u64))
}
