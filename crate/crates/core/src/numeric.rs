//! Small numerical kernels shared by the prediction code: binomial
//! probabilities evaluated in log space, and 1-D root finding / minimization.

use statrs::function::gamma::ln_gamma;

pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

pub fn factorial(k: u64) -> f64 {
    ln_factorial(k).exp().round().max(1.0)
}

/// ln P(Bin(n, p) = k); `-inf` when the mass is exactly zero.
pub fn binom_ln_pmf(n: u64, k: u64, p: f64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if p <= 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p >= 1.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
        + k as f64 * p.ln()
        + (n - k) as f64 * (-p).ln_1p()
}

pub fn binom_pmf(n: u64, k: u64, p: f64) -> f64 {
    binom_ln_pmf(n, k, p).exp()
}

/// P(Bin(n, p) >= k).
///
/// The tail on the far side of the mean is summed directly so that tiny
/// upper tails keep full relative precision.
pub fn binom_sf(n: u64, k: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let mean = n as f64 * p;
    if k as f64 > mean {
        sum_upward(n, k, p)
    } else {
        (1.0 - sum_downward(n, k - 1, p)).clamp(0.0, 1.0)
    }
}

/// P(Bin(n, p) <= k).
pub fn binom_cdf(n: u64, k: u64, p: f64) -> f64 {
    if k >= n || p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    let mean = n as f64 * p;
    if (k as f64) < mean {
        sum_downward(n, k, p)
    } else {
        (1.0 - sum_upward(n, k + 1, p)).clamp(0.0, 1.0)
    }
}

// sum_{j >= k} pmf(j), assuming k is at or beyond the mode.
fn sum_upward(n: u64, k: u64, p: f64) -> f64 {
    let ratio = p / (1.0 - p);
    let mut term = binom_pmf(n, k, p);
    let mut total = term;
    let mut j = k;
    while j < n {
        term *= (n - j) as f64 / (j + 1) as f64 * ratio;
        j += 1;
        total += term;
        if term <= total * 1e-18 {
            break;
        }
    }
    total.min(1.0)
}

// sum_{j <= k} pmf(j), assuming k is at or below the mode.
fn sum_downward(n: u64, k: u64, p: f64) -> f64 {
    let ratio = (1.0 - p) / p;
    let mut term = binom_pmf(n, k, p);
    let mut total = term;
    let mut j = k;
    while j > 0 {
        term *= j as f64 / (n - j + 1) as f64 * ratio;
        j -= 1;
        total += term;
        if term <= total * 1e-18 {
            break;
        }
    }
    total.min(1.0)
}

/// Bisection for a sign change of `f` on `[lo, hi]`, to absolute width `tol`.
pub fn bisect(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`,
/// stopping when the bracket is narrower than `rel_tol` relative to its
/// midpoint. Returns `(argmin, min)`.
pub fn golden_min(mut lo: f64, mut hi: f64, rel_tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..500 {
        let scale = (0.5 * (lo + hi)).abs().max(f64::MIN_POSITIVE);
        if hi - lo <= rel_tol * scale {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimizes `f` over `[lo, hi]`: a coarse scan on `points` geometrically
/// (or linearly, when `lo == 0`) spaced abscissae picks the bracket, then
/// golden-section refines it.
pub fn scan_then_golden(
    lo: f64,
    hi: f64,
    points: usize,
    rel_tol: f64,
    f: impl Fn(f64) -> f64,
) -> (f64, f64) {
    let points = points.max(3);
    let xs: Vec<f64> = if lo > 0.0 {
        let (a, b) = (lo.ln(), hi.ln());
        (0..points)
            .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
            .collect()
    } else {
        (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect()
    };
    let (best, _) = xs
        .iter()
        .map(|&x| f(x))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(points - 1)];
    golden_min(a, b, rel_tol, f)
}
