use crate::engine::SeedSpec;
use crate::error::{Error, Result};

use super::{Runner, SweepRow};

/// First upward crossing of `level` by the mean fraction, interpolated
/// linearly in `log a` between the bracketing rows.
pub fn crossing(rows: &[SweepRow], level: f64) -> Result<f64> {
    for w in rows.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        if lo.mean_fraction < level && hi.mean_fraction >= level {
            let frac = (level - lo.mean_fraction) / (hi.mean_fraction - lo.mean_fraction);
            return Ok(if lo.a == 0 {
                hi.a as f64 * frac
            } else {
                let (la, lb) = ((lo.a as f64).ln(), (hi.a as f64).ln());
                (la + frac * (lb - la)).exp()
            });
        }
    }
    Err(Error::NoTransition)
}

/// The empirical transition: where the mean final fraction first reaches 0.5.
pub fn locate_transition(rows: &[SweepRow]) -> Result<f64> {
    crossing(rows, 0.5)
}

/// Bisects the bracketing interval geometrically, adding a point with
/// `runs` fresh runs per round. New points use indices from `first_index`.
pub(crate) fn refine_transition(
    runner: &Runner<'_>,
    rows: &mut Vec<SweepRow>,
    first_index: u64,
    rounds: usize,
    runs: usize,
) -> Result<f64> {
    for round in 0..rounds {
        locate_transition(rows)?;
        let i = rows
            .windows(2)
            .position(|w| w[0].mean_fraction < 0.5 && w[1].mean_fraction >= 0.5)
            .ok_or(Error::NoTransition)?;
        let (lo, hi) = (rows[i].a, rows[i + 1].a);
        let mid = ((lo.max(1) as f64) * hi as f64).sqrt().round() as usize;
        if mid <= lo || mid >= hi {
            break;
        }
        let row = runner.point(first_index + round as u64, &SeedSpec::Uniform(mid), runs)?;
        log::debug!("refine: a = {mid}: mean fraction {:.4}", row.mean_fraction);
        rows.insert(i + 1, row);
    }
    locate_transition(rows)
}
