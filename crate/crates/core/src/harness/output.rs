use std::io::Write;

use crate::error::Result;

use super::SweepResult;

pub const CSV_COLUMNS: [&str; 10] = [
    "model",
    "params",
    "a",
    "runs",
    "mean_fraction",
    "stddev",
    "a_c_pred",
    "t_c_pred",
    "rho_star",
    "q_rho_star",
];

/// One `#` metadata line, the header, then one row per grid point.
/// Nothing here depends on the worker count, so reruns are byte-identical.
pub fn write_csv<W: Write>(mut out: W, result: &SweepResult) -> Result<()> {
    let transition = result
        .transition
        .map(|t| format!("{t:.6}"))
        .unwrap_or_else(|| "none".into());
    writeln!(
        out,
        "# dynamics={}; process={}; seed={}; transition={} (first 0.5-crossing of mean_fraction, log-linear interpolation); predictor={}; monotonicity_violations={}",
        result.dynamics,
        result.process,
        result.seed,
        transition,
        result.prediction.as_ref().map_or("none", |p| p.variant),
        result.monotonicity_violations.len(),
    )?;
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(CSV_COLUMNS)?;
    let pred = result.prediction.as_ref();
    let opt = |v: Option<String>| v.unwrap_or_default();
    let params = result.params.to_string();
    for row in &result.rows {
        csv.write_record([
            result.model.clone(),
            params.clone(),
            row.a.to_string(),
            row.runs.to_string(),
            row.mean_fraction.to_string(),
            row.stddev.to_string(),
            opt(pred.map(|p| p.a_c.to_string())),
            opt(pred.map(|p| p.t_c.to_string())),
            opt(pred.map(|p| p.rho_star.to_string())),
            opt(pred.map(|p| p.q_rho_star.to_string())),
        ])?;
    }
    csv.flush()?;
    Ok(())
}
