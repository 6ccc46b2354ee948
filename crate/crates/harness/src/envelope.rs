//! Sufficient-decrease envelopes along a line, for plotting.
//!
//! For a line `x + alpha d`, the classical envelope is `f(x) - gamma alpha^2`
//! and the new one is anchored at the tentative point:
//! `f(x + abar d) - gamma (alpha - abar)^2`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::output::{ensure_dir, fmt_f64, write_bytes};
use crate::runs::problem;

pub const ENVELOPE_FILE: &str = "envelope.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSpec {
    pub problem: String,
    pub x: Vec<f64>,
    pub dir: Vec<f64>,
    pub abar: f64,
    pub gamma: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub alpha: f64,
    pub f_along_line: f64,
    pub classical_envelope: f64,
    pub new_envelope: f64,
}

/// Grid points `alpha_min + j * alpha_step` up to `alpha_max`, tolerating
/// rounding in the count.
pub fn alpha_grid(alpha_min: f64, alpha_max: f64, alpha_step: f64) -> Result<Vec<f64>> {
    if alpha_step.is_nan()
        || alpha_step <= 0.0
        || !alpha_min.is_finite()
        || !alpha_max.is_finite()
        || alpha_max < alpha_min
    {
        return Err(HarnessError::Usage(format!(
            "empty alpha grid: min {alpha_min}, max {alpha_max}, step {alpha_step}"
        )));
    }
    let count = ((alpha_max - alpha_min) / alpha_step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|j| alpha_min + j as f64 * alpha_step).collect())
}

/// Tabulate both envelopes along the line described by `spec`.
pub fn envelope_rows(spec: &EnvelopeSpec) -> Result<Vec<EnvelopeRow>> {
    let problem = problem(&spec.problem)?;
    if spec.x.len() != problem.dim || spec.dir.len() != problem.dim {
        return Err(HarnessError::Usage(format!(
            "{} has dimension {}, got point of length {} and direction of length {}",
            problem.name,
            problem.dim,
            spec.x.len(),
            spec.dir.len()
        )));
    }
    let along = |alpha: f64| -> f64 {
        let point: Vec<f64> = spec.x.iter().zip(&spec.dir).map(|(x, d)| x + alpha * d).collect();
        problem.value(&point)
    };
    let f_x = problem.value(&spec.x);
    let f_abar = along(spec.abar);
    Ok(alpha_grid(spec.alpha_min, spec.alpha_max, spec.alpha_step)?
        .into_iter()
        .map(|alpha| EnvelopeRow {
            alpha,
            f_along_line: along(alpha),
            classical_envelope: f_x - spec.gamma * alpha * alpha,
            new_envelope: f_abar - spec.gamma * (alpha - spec.abar) * (alpha - spec.abar),
        })
        .collect())
}

pub fn envelope_csv(rows: &[EnvelopeRow]) -> Result<Vec<u8>> {
    let to_err = |e: csv::Error| HarnessError::write(ENVELOPE_FILE, e);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha", "f_along_line", "classical_envelope", "new_envelope"])
        .map_err(to_err)?;
    for r in rows {
        w.write_record([
            fmt_f64(r.alpha),
            fmt_f64(r.f_along_line),
            fmt_f64(r.classical_envelope),
            fmt_f64(r.new_envelope),
        ])
        .map_err(to_err)?;
    }
    w.into_inner()
        .map_err(|e| HarnessError::write(ENVELOPE_FILE, e.into_error()))
}

/// Write `envelope.csv` into `out_dir`.
pub fn export_envelopes(spec: &EnvelopeSpec, out_dir: &Path) -> Result<Vec<EnvelopeRow>> {
    let rows = envelope_rows(spec)?;
    ensure_dir(out_dir)?;
    write_bytes(&out_dir.join(ENVELOPE_FILE), &envelope_csv(&rows)?)?;
    Ok(rows)
}
