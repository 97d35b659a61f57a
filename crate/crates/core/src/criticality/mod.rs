//! Critical seed-set sizes: closed forms for G(n,p), G(n,M) and the
//! configuration model, a numerical variant for degree-dependent thresholds,
//! power-law moments and scaling exponents, block-model bounds, and the rate
//! constants of the limit theorems.

mod block;
mod powerlaw;
mod predictors;
mod rates;

pub use block::{block_critical, block_seed_bounds, p_hat, p_hat_multinomial, BlockPrediction, SeedBounds};
pub use powerlaw::{powerlaw_moment, powerlaw_moment_asymptotic, scaling_exponent_ac};
pub use predictors::{default_predictor, predictors, Predictor};
pub(crate) use predictors::constant_r;
pub use rates::{
    binom_tail_bound, c1, c2, phi, rate_constants, rate_h, subcritical_ratio, RateConstants, TailSide,
};

use crate::engine::ThresholdRule;
use crate::error::{Error, Result};
use crate::influence::ActivationProfile;
use crate::numeric::{binom_sf, factorial, golden_min};

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPrediction {
    pub model: String,
    /// Which formula produced the numbers.
    pub variant: &'static str,
    /// Critical time in used-node units, so that `a_c = (1 - 1/rho*) t_c`
    /// for the closed forms.
    pub t_c: f64,
    pub a_c: f64,
    pub rho_star: usize,
    pub q_rho_star: f64,
    pub d_star: Option<f64>,
    pub mean_degree: Option<f64>,
    pub p_hat: Option<Vec<f64>>,
}

impl CriticalPrediction {
    fn closed(model: String, variant: &'static str, t_c: f64, rho: usize, q: f64) -> Self {
        CriticalPrediction {
            model,
            variant,
            t_c,
            a_c: (1.0 - 1.0 / rho as f64) * t_c,
            rho_star: rho,
            q_rho_star: q,
            d_star: None,
            mean_degree: None,
            p_hat: None,
        }
    }
}

/// `t_c = ((rho*-1)! / (n p^rho* q_rho*))^(1/(rho*-1))`, `a_c = (1 - 1/rho*) t_c`.
pub fn critical_gnp(n: usize, p: f64, profile: &ActivationProfile) -> Result<CriticalPrediction> {
    let rho = profile.rho_star;
    let q = profile.q_rho_star();
    if !(q > 0.0) || rho < 2 {
        return Err(Error::invalid("activation profile", "needs rho* >= 2 and q_rho* > 0"));
    }
    if !(p > 0.0 && p <= 1.0) || n == 0 {
        return Err(Error::invalid("gnp", format!("n = {n}, p = {p}")));
    }
    let nf = n as f64;
    if nf * p < 1.0 {
        log::warn!("n p = {} is not large; prediction is outside its regime", nf * p);
    }
    if p >= nf.powf(-1.0 / rho as f64) {
        log::warn!("p = {p} is not below n^(-1/rho*); prediction is outside its regime");
    }
    let r = rho as f64;
    let t_c = (factorial(rho as u64 - 1) / (nf * p.powi(rho as i32) * q)).powf(1.0 / (r - 1.0));
    Ok(CriticalPrediction::closed(
        format!("gnp(n={n},p={p})"),
        "gnp-closed",
        t_c,
        rho,
        q,
    ))
}

/// `a_c = (1 - 1/r) ((r-1)! / ((2M/n) (2M/n^2)^(r-1)))^(1/(r-1))`.
pub fn critical_gnm(n: usize, m: usize, r: u32) -> Result<CriticalPrediction> {
    if r < 2 {
        return Err(Error::invalid("gnm", format!("r = {r} must be at least 2")));
    }
    if n == 0 || m == 0 {
        return Err(Error::invalid("gnm", "needs n > 0 and M > 0"));
    }
    let (nf, mf, rf) = (n as f64, m as f64, r as f64);
    if mf <= nf {
        log::warn!("M = {m} is not much larger than n = {n}");
    }
    let d_bar = 2.0 * mf / nf;
    let pair = 2.0 * mf / (nf * nf);
    let t_c = (factorial(r as u64 - 1) / (d_bar * pair.powi(r as i32 - 1))).powf(1.0 / (rf - 1.0));
    let mut pred = CriticalPrediction::closed(format!("gnm(n={n},M={m})"), "gnm-closed", t_c, r as usize, 1.0);
    pred.mean_degree = Some(d_bar);
    Ok(pred)
}

fn law_mean(law: &[(u32, f64)]) -> Result<f64> {
    if law.is_empty() {
        return Err(Error::invalid("degree law", "empty"));
    }
    let total: f64 = law.iter().map(|&(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("degree law", format!("probabilities sum to {total}")));
    }
    Ok(law.iter().map(|&(d, p)| d as f64 * p).sum())
}

/// `d* = sum_{d >= r} (d/d_bar)^r (d - r)/d_bar p(d)`.
pub fn d_star(law: &[(u32, f64)], r: u32) -> Result<f64> {
    let d_bar = law_mean(law)?;
    Ok(law
        .iter()
        .filter(|&&(d, _)| d >= r)
        .map(|&(d, p)| (d as f64 / d_bar).powi(r as i32) * (d - r) as f64 / d_bar * p)
        .sum())
}

/// `a_c = (1 - 1/r) n ((r-1)! / (d_bar^r d*))^(1/(r-1))`.
pub fn critical_config(n: usize, law: &[(u32, f64)], r: u32) -> Result<CriticalPrediction> {
    if r < 2 {
        return Err(Error::invalid("config", format!("r = {r} must be at least 2")));
    }
    let d_bar = law_mean(law)?;
    let ds = d_star(law, r)?;
    if !(ds > 0.0) {
        return Err(Error::invalid("config", format!("no degree above r = {r}")));
    }
    if d_bar <= r as f64 {
        log::warn!("mean degree {d_bar} does not exceed r = {r}");
    }
    let rf = r as f64;
    let t_c = n as f64
        * (factorial(r as u64 - 1) / (d_bar.powi(r as i32) * ds)).powf(1.0 / (rf - 1.0));
    let mut pred =
        CriticalPrediction::closed(format!("config(n={n},d_bar={d_bar:.4})"), "config-closed", t_c, r as usize, 1.0);
    pred.d_star = Some(ds);
    pred.mean_degree = Some(d_bar);
    Ok(pred)
}

/// Minimizes the mean usable-edge drift
/// `m(t) = n sum_d P(Bin(d, t/(n d_bar)) >= r(d)) (d - r(d)) p(d) - t`
/// over edge time `t` in `(0, n d_bar)` and takes its first local minimum;
/// `a_c = -m(t_c)/d_bar`.
/// `t_c` is reported in node units (edge time divided by `d_bar`).
pub fn critical_config_numeric(
    n: usize,
    law: &[(u32, f64)],
    rule: &dyn ThresholdRule,
) -> Result<CriticalPrediction> {
    let d_bar = law_mean(law)?;
    let terms: Vec<(u32, u32, f64)> = law
        .iter()
        .map(|&(d, p)| (d, rule.threshold(d), p))
        .collect();
    if let Some(&(d, r, _)) = terms.iter().find(|&&(_, r, p)| r < 2 && p > 0.0) {
        return Err(Error::invalid(
            "threshold rule",
            format!("r({d}) = {r} is below 2"),
        ));
    }
    let nf = n as f64;
    // drift per node as a function of x = t / (n d_bar)
    let drift = |x: f64| -> f64 {
        terms
            .iter()
            .filter(|&&(d, r, _)| d > r)
            .map(|&(d, r, p)| binom_sf(d as u64, r as u64, x) * (d - r) as f64 * p)
            .sum::<f64>()
            - d_bar * x
    };
    let points = 600;
    let (lo, hi) = (1e-12f64, 1.0f64);
    let xs: Vec<f64> = (0..points)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (points - 1) as f64).exp())
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| drift(x)).collect();
    // the drift returns to -r(d) once everything is active; the critical
    // point is the first interior local minimum
    let best = (1..points - 1)
        .find(|&i| vals[i] <= vals[i - 1] && vals[i] < vals[i + 1])
        .filter(|&i| vals[i] < 0.0)
        .ok_or(Error::Degenerate { horizon: nf * d_bar })?;
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(points - 1)];
    let (x_c, m_min) = golden_min(a, b, 1e-10, drift);
    let a_c = -nf * m_min / d_bar;
    let rho = terms.iter().filter(|t| t.2 > 0.0).map(|t| t.1).min().unwrap_or(2) as usize;
    Ok(CriticalPrediction {
        model: format!("config(n={n},d_bar={d_bar:.4},r={})", rule.name()),
        variant: "config-numeric",
        t_c: nf * x_c,
        a_c,
        rho_star: rho,
        q_rho_star: 1.0,
        d_star: None,
        mean_degree: Some(d_bar),
        p_hat: None,
    })
}
