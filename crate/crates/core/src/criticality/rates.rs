use crate::error::{Error, Result};
use crate::numeric::{bisect, scan_then_golden};

/// `H(x) = 1 - x + x ln x`, with `H(0) = 1` and `H(x) = inf` for `x < 0`.
pub fn rate_h(x: f64) -> f64 {
    if x < 0.0 {
        f64::INFINITY
    } else if x == 0.0 {
        1.0
    } else {
        1.0 - x + x * x.ln()
    }
}

fn check_rho(rho: usize) -> Result<f64> {
    if rho < 2 {
        Err(Error::invalid("rate constants", format!("rho* = {rho} must be at least 2")))
    } else {
        Ok(rho as f64)
    }
}

/// Supercritical exponent constant: the minimum over `x >= alpha(rho-1)/rho`
/// of `x^rho / (alpha(rho-1)) * H((x rho - alpha(rho-1)) / x^rho)`.
pub fn c1(rho: usize, alpha: f64) -> Result<f64> {
    let r = check_rho(rho)?;
    if !(alpha > 1.0) {
        return Err(Error::invalid("C1", format!("alpha = {alpha} must exceed 1")));
    }
    let k = alpha * (r - 1.0);
    let f = |x: f64| x.powf(r) / k * rate_h((x * r - k) / x.powf(r));
    let lo = k / r;
    // grow the upper end until the objective has risen three times in a row
    let mut hi = 2.0 * lo.max(1.0);
    let mut prev = f(hi);
    let mut rises = 0;
    while rises < 3 {
        hi *= 2.0;
        let v = f(hi);
        rises = if v > prev { rises + 1 } else { 0 };
        prev = v;
    }
    let (_, min) = scan_then_golden(lo, hi, 400, 1e-8, f);
    Ok(min.min(f(lo)))
}

/// Subcritical concentration constant `H(1 + eps rho) / (alpha (rho - 1))`.
pub fn c2(rho: usize, alpha: f64, eps: f64) -> Result<f64> {
    let r = check_rho(rho)?;
    check_subcritical(alpha)?;
    Ok(rate_h(1.0 + eps * r) / (alpha * (r - 1.0)))
}

fn check_subcritical(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("alpha", format!("{alpha} is outside (0, 1)")))
    }
}

/// Root in `[0, 1]` of `h(x) = x - x^rho/rho - alpha (1 - 1/rho)`.
pub fn phi(rho: usize, alpha: f64) -> Result<f64> {
    let r = check_rho(rho)?;
    check_subcritical(alpha)?;
    let h = |x: f64| x - x.powf(r) / r - alpha * (1.0 - 1.0 / r);
    Ok(bisect(0.0, 1.0, 1e-12, h))
}

/// Predicted `A*/a` below the transition: `rho/(rho-1) * phi(alpha)/alpha`.
pub fn subcritical_ratio(rho: usize, alpha: f64) -> Result<f64> {
    let r = rho as f64;
    Ok(r / (r - 1.0) * phi(rho, alpha)? / alpha)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateConstants {
    pub alpha: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub phi: Option<f64>,
    pub subcritical_ratio: Option<f64>,
}

/// `C1` above the transition (`alpha > 1`); `C2`, `phi` and the final-size
/// ratio below it.
pub fn rate_constants(rho: usize, alpha: f64, eps: f64) -> Result<RateConstants> {
    check_rho(rho)?;
    if alpha == 1.0 || !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid("alpha", format!("{alpha}: must be positive and not 1")));
    }
    if alpha > 1.0 {
        Ok(RateConstants {
            alpha,
            c1: Some(c1(rho, alpha)?),
            c2: None,
            phi: None,
            subcritical_ratio: None,
        })
    } else {
        Ok(RateConstants {
            alpha,
            c1: None,
            c2: Some(c2(rho, alpha, eps)?),
            phi: Some(phi(rho, alpha)?),
            subcritical_ratio: Some(subcritical_ratio(rho, alpha)?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    /// `P(Bin <= k)`, needs `k <= np`.
    Lower,
    /// `P(Bin >= k)`, needs `k > np`.
    Upper,
}

/// Chernoff bound `exp(-mu H(k/mu))` on a binomial tail, `mu = np`.
pub fn binom_tail_bound(n: u64, p: f64, k: u64, side: TailSide) -> Result<f64> {
    let mu = n as f64 * p;
    if !(mu > 0.0) {
        return Err(Error::invalid("tail bound", "np must be positive"));
    }
    let kf = k as f64;
    match side {
        TailSide::Lower if kf > mu => Err(Error::invalid(
            "tail bound",
            format!("lower tail needs k <= np, got k = {k}, np = {mu}"),
        )),
        TailSide::Upper if kf <= mu => Err(Error::invalid(
            "tail bound",
            format!("upper tail needs k > np, got k = {k}, np = {mu}"),
        )),
        _ => Ok((-mu * rate_h(kf / mu)).exp()),
    }
}
