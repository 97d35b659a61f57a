use crate::error::{Error, Result};

/// Exact k-th moment of `p(d) ∝ d^-beta` on the integers `d_min..=d_max`.
pub fn powerlaw_moment(k: f64, beta: f64, d_min: u32, d_max: u32) -> Result<f64> {
    if d_min > d_max || (d_min == 0 && beta > 0.0) {
        return Err(Error::invalid(
            "power law",
            format!("support {d_min}..={d_max} with beta = {beta}"),
        ));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for d in d_min..=d_max {
        let df = d as f64;
        let w = if d == 0 { 1.0 } else { df.powf(-beta) };
        num += df.powf(k) * w;
        den += w;
    }
    Ok(num / den)
}

/// Leading-order k-th moment, one of three branches by `beta` vs `1` and
/// `k + 1`. The branch points themselves are rejected.
pub fn powerlaw_moment_asymptotic(k: f64, beta: f64, d_min: f64, d_max: f64) -> Result<f64> {
    if beta == 1.0 || beta == k + 1.0 {
        return Err(Error::BranchBoundary(format!("beta = {beta} with k = {k}")));
    }
    Ok(if beta > k + 1.0 {
        d_min.powf(k) * (beta - 1.0) / (beta - k - 1.0)
    } else if beta > 1.0 {
        d_min.powf(beta - 1.0) * d_max.powf(k + 1.0 - beta) * (beta - 1.0) / (k + 1.0 - beta)
    } else {
        d_max.powf(k) * (1.0 - beta) / (k + 1.0 - beta)
    })
}

/// Growth exponent of `a_c` in `n` for `d_min = n^gamma`, `d_max = n^zeta`.
pub fn scaling_exponent_ac(r: u32, beta: f64, gamma: f64, zeta: f64) -> Result<f64> {
    if r < 2 {
        return Err(Error::invalid("scaling exponent", "r must be at least 2"));
    }
    let rf = r as f64;
    if gamma < 0.0 {
        return Err(Error::invalid("scaling exponent", "gamma must be nonnegative"));
    }
    if beta == 2.0 || beta == rf + 2.0 {
        return Err(Error::BranchBoundary(format!("beta = {beta} with r = {r}")));
    }
    if beta > rf + 2.0 {
        if gamma == 0.0 {
            return Err(Error::BranchBoundary(format!(
                "beta = {beta} > r + 2 needs gamma > 0"
            )));
        }
        Ok(1.0 - gamma * rf / (rf - 1.0))
    } else if beta > 2.0 {
        Ok(1.0 - (gamma * (beta - 2.0) + zeta * (rf + 2.0 - beta)) / (rf - 1.0))
    } else {
        Ok(1.0 - zeta * rf / (rf - 1.0))
    }
}
