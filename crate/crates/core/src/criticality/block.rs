use crate::error::{Error, Result};
use crate::numeric::{factorial, ln_factorial};

fn check_block(sizes: &[usize], probs: &[Vec<f64>], r: u32) -> Result<()> {
    let k = sizes.len();
    if k == 0 || probs.len() != k || probs.iter().any(|row| row.len() != k) {
        return Err(Error::invalid("block model", "sizes and matrix disagree"));
    }
    if r < 2 {
        return Err(Error::invalid("block model", "r must be at least 2"));
    }
    for a in 0..k {
        for b in 0..k {
            if probs[a][b] != probs[b][a] {
                return Err(Error::invalid(
                    "block model",
                    format!("matrix is not symmetric at ({a}, {b})"),
                ));
            }
            if a != b && probs[a][b] >= probs[a][a].min(probs[b][b]) && probs[a][b] > 0.0 {
                log::warn!("p[{a}][{b}] is not below both diagonal entries");
            }
        }
    }
    Ok(())
}

/// Effective probability of community `k`: `p_kk + sum_{j != k} p_jk`.
pub fn p_hat(probs: &[Vec<f64>], k: usize) -> f64 {
    probs.iter().map(|row| row[k]).sum()
}

/// `(r! sum_{rho_1+..+rho_K = r} prod_j p_jk^rho_j / rho_j!)^(1/r)`, summed
/// term by term over all compositions of `r`.
pub fn p_hat_multinomial(probs: &[Vec<f64>], k: usize, r: u32) -> f64 {
    fn walk(col: &[f64], left: u32, acc: f64, out: &mut f64) {
        match col.split_first() {
            None => {
                if left == 0 {
                    *out += acc;
                }
            }
            Some((&p, rest)) => {
                for rho in 0..=left {
                    let term = if rho == 0 {
                        1.0
                    } else {
                        (rho as f64 * p.ln() - ln_factorial(rho as u64)).exp()
                    };
                    walk(rest, left - rho, acc * term, out);
                }
            }
        }
    }
    let col: Vec<f64> = probs.iter().map(|row| row[k]).collect();
    let mut sum = 0.0;
    walk(&col, r, 1.0, &mut sum);
    (factorial(r as u64) * sum).powf(1.0 / r as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockPrediction {
    pub community: usize,
    pub size: usize,
    pub p_hat: f64,
    /// `(1 - 1/r)((r-1)!/(n_k p_hat^r))^(1/(r-1))`.
    pub a_c_bar: f64,
    /// Same with `p_kk` alone, inter-community edges removed.
    pub a_c_reduced: f64,
}

fn community_a_c(n_k: usize, p: f64, r: u32) -> f64 {
    let rf = r as f64;
    (1.0 - 1.0 / rf) * (factorial(r as u64 - 1) / (n_k as f64 * p.powi(r as i32))).powf(1.0 / (rf - 1.0))
}

pub fn block_critical(sizes: &[usize], probs: &[Vec<f64>], r: u32) -> Result<Vec<BlockPrediction>> {
    check_block(sizes, probs, r)?;
    Ok((0..sizes.len())
        .map(|k| {
            let ph = p_hat(probs, k);
            BlockPrediction {
                community: k,
                size: sizes[k],
                p_hat: ph,
                a_c_bar: community_a_c(sizes[k], ph, r),
                a_c_reduced: community_a_c(sizes[k], probs[k][k], r),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedBounds {
    /// Seeds placed uniformly at random: `(1+eps) n max_k a_c_bar^(k)/n_k`.
    pub uniform_bound: f64,
    /// All seeds in `optimal_community`:
    /// `(1+eps)(1-1/r) min_k ((r-1)!/(n_k p_kk^r))^(1/(r-1))`.
    pub optimal_bound: f64,
    /// Argmax of `n_k p_kk^r`, lowest index on ties.
    pub optimal_community: usize,
    /// Uniform seeding sized so that enough land in the optimal community:
    /// `optimal_bound * n / n_k0`.
    pub uniform_via_optimal: f64,
}

pub fn block_seed_bounds(sizes: &[usize], probs: &[Vec<f64>], r: u32, eps: f64) -> Result<SeedBounds> {
    let per = block_critical(sizes, probs, r)?;
    let n: usize = sizes.iter().sum();
    let uniform_bound = (1.0 + eps)
        * n as f64
        * per
            .iter()
            .map(|c| c.a_c_bar / c.size as f64)
            .fold(f64::NEG_INFINITY, f64::max);
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for k in 0..sizes.len() {
        let score = sizes[k] as f64 * probs[k][k].powi(r as i32);
        if score > best_score {
            best = k;
            best_score = score;
        }
    }
    if !(best_score > 0.0) {
        return Err(Error::invalid("block model", "every diagonal probability is zero"));
    }
    let optimal_bound = (1.0 + eps) * community_a_c(sizes[best], probs[best][best], r);
    Ok(SeedBounds {
        uniform_bound,
        optimal_bound,
        optimal_community: best,
        uniform_via_optimal: optimal_bound * n as f64 / sizes[best] as f64,
    })
}
