//! Flat-file persistence: trace CSV and JSON summaries.
//!
//! Trace columns, in order: `k, f_x, max_tilde_alpha, phi, success,
//! evals_cum, grad_norm, bound_rhs`. The last two are empty when no
//! gradient (or no Lipschitz constant) is known. Floats use Rust's
//! shortest round-trip `Debug` form, so identical runs give identical bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use lam_core::driver::{IterationRecord, SolveResult, SolveStatus};
use lam_core::theory::{gradient_bound_rhs, TheoryContext};
use lam_core::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const TRACE_HEADER: [&str; 8] = [
    "k",
    "f_x",
    "max_tilde_alpha",
    "phi",
    "success",
    "evals_cum",
    "grad_norm",
    "bound_rhs",
];

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::write(dir, e))
}

/// Render the trace as CSV. `theory` fills the `bound_rhs` column.
pub fn trace_csv(trace: &[IterationRecord], theory: Option<&TheoryContext>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| HarnessError::write("<trace>", e);
    w.write_record(TRACE_HEADER).map_err(to_err)?;
    for r in trace {
        let bound = theory.map(|ctx| gradient_bound_rhs(ctx, r.max_tilde_alpha, r.success));
        w.write_record([
            r.k.to_string(),
            fmt_f64(r.f_x),
            fmt_f64(r.max_tilde_alpha),
            fmt_f64(r.phi),
            r.success.to_string(),
            r.evals_cum.to_string(),
            fmt_opt(r.grad_norm),
            fmt_opt(bound),
        ])
        .map_err(to_err)?;
    }
    w.into_inner()
        .map_err(|e| HarnessError::write("<trace>", e.into_error()))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| HarnessError::write(path, e))?;
    file.write_all(bytes).map_err(|e| HarnessError::write(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| HarnessError::write(path, e))?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

/// JSON summary of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub problem: String,
    pub config: SolverConfig,
    pub status: SolveStatus,
    pub iterations: u64,
    pub evaluations: u64,
    pub f_final: f64,
    pub x_final: Vec<f64>,
}

impl SolveSummary {
    pub fn new(problem: &str, config: &SolverConfig, result: &SolveResult) -> Self {
        Self {
            problem: problem.to_string(),
            config: config.clone(),
            status: result.status,
            iterations: result.iterations,
            evaluations: result.evaluations,
            f_final: result.f_final,
            x_final: result.x_final.to_vec(),
        }
    }
}
