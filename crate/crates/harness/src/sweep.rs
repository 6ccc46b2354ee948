//! Epsilon sweeps: hitting times against the worst-case bounds.
//!
//! Each epsilon gets its own solve from the problem's default start. The
//! analytic gradient is consulted before every iteration to detect the first
//! `k` with `||grad f(x_k)|| <= eps`; it never reaches the solver, so the
//! evaluation counts are those of the derivative-free method alone.

use std::path::Path;

use lam_core::driver::Lam;
use lam_core::problems::TestProblem;
use lam_core::theory::{feval_bound, iteration_bound, TheoryContext};
use lam_core::types::norm2;
use lam_core::{Error, SolveStatus, SolverConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::output::{ensure_dir, fmt_f64, write_bytes, write_json};
use crate::runs::{oracle_for, problem};

pub const DEFAULT_EPSILONS: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
pub const SWEEP_JSON: &str = "sweep.json";
pub const SWEEP_CSV: &str = "sweep.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    /// First iteration index whose iterate meets the gradient threshold.
    pub hitting_iteration: Option<u64>,
    /// Oracle calls spent before that iterate was reached, including `f(x0)`.
    pub hitting_evaluations: Option<u64>,
    pub iteration_bound: u64,
    pub feval_bound: u64,
    /// Why the solve ended when the threshold was never met.
    pub stopped: Option<SolveStatus>,
}

impl SweepRow {
    pub fn within_bounds(&self) -> bool {
        match (self.hitting_iteration, self.hitting_evaluations) {
            (Some(k), Some(evals)) => k <= self.iteration_bound && evals <= self.feval_bound,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub problem: String,
    pub config: SolverConfig,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln(hitting_iteration)` against `ln(1/eps)`.
    pub slope_fit: Option<f64>,
}

impl SweepResult {
    pub fn all_within_bounds(&self) -> bool {
        self.rows.iter().all(SweepRow::within_bounds)
    }
}

fn check_epsilons(epsilons: &[f64]) -> Result<()> {
    if epsilons.is_empty() {
        return Err(HarnessError::Usage("at least one epsilon is required".into()));
    }
    match epsilons.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
        Some(&bad) => Err(Error::EpsilonOutOfRange(bad).into()),
        None => Ok(()),
    }
}

fn sweep_one(
    problem: &TestProblem,
    config: &SolverConfig,
    ctx: &TheoryContext,
    gap: f64,
    eps: f64,
) -> Result<SweepRow> {
    let gradient = problem.gradient.clone().expect("checked by caller");
    let mut lam = Lam::new(problem.x0.clone(), oracle_for(problem), config.clone())?;
    let mut hit = None;
    let mut stopped = None;
    loop {
        if norm2(&gradient(lam.state().x.as_slice())) <= eps {
            hit = Some((lam.state().k, lam.evaluations()));
            break;
        }
        if let Some(status) = lam.stop_reason() {
            stopped = Some(status);
            break;
        }
        let record = lam.step();
        if !record.complete {
            stopped = Some(SolveStatus::EvaluationBudget);
            break;
        }
    }
    Ok(SweepRow {
        epsilon: eps,
        hitting_iteration: hit.map(|h| h.0),
        hitting_evaluations: hit.map(|h| h.1),
        iteration_bound: iteration_bound(ctx, eps)?,
        feval_bound: feval_bound(ctx, eps, config.variant, gap)?,
        stopped,
    })
}

/// Ordinary least squares slope of `ln(hit)` on `ln(1/eps)` over rows that
/// hit at iteration 1 or later. Fewer than two usable points give `None`.
pub fn fit_slope(rows: &[SweepRow]) -> Option<f64> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| match r.hitting_iteration {
            Some(k) if k >= 1 => Some(((1.0 / r.epsilon).ln(), (k as f64).ln())),
            _ => None,
        })
        .collect();
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    Some(sxy / sxx)
}

/// Sweep `epsilons` on a problem value. Rows run in parallel and come back
/// in input order.
pub fn sweep_problem(problem: &TestProblem, config: &SolverConfig, epsilons: &[f64]) -> Result<SweepResult> {
    check_epsilons(epsilons)?;
    config.validate()?;
    let unverifiable = |reason: &str| HarnessError::Unverifiable {
        problem: problem.name.clone(),
        reason: reason.to_string(),
    };
    if problem.gradient.is_none() {
        return Err(unverifiable("no analytic gradient for hitting detection"));
    }
    let lipschitz = problem
        .lipschitz
        .ok_or_else(|| unverifiable("no gradient Lipschitz constant"))?;
    let f_min = problem.f_min.ok_or_else(|| unverifiable("no known lower bound"))?;
    let f_x0 = problem.value(&problem.x0);
    let ctx = TheoryContext::new(problem.dim, lipschitz, config, f_min, f_x0)?;
    let gap = f_x0 - f_min;

    let rows = epsilons
        .par_iter()
        .map(|&eps| sweep_one(problem, config, &ctx, gap, eps))
        .collect::<Result<Vec<_>>>()?;
    let slope_fit = fit_slope(&rows);
    Ok(SweepResult {
        problem: problem.name.clone(),
        config: config.clone(),
        rows,
        slope_fit,
    })
}

fn sweep_csv(result: &SweepResult) -> Result<Vec<u8>> {
    let to_err = |e: csv::Error| HarnessError::write(SWEEP_CSV, e);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "epsilon",
        "hitting_iteration",
        "hitting_evaluations",
        "iteration_bound",
        "feval_bound",
        "within_bounds",
    ])
    .map_err(to_err)?;
    let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &result.rows {
        w.write_record([
            fmt_f64(r.epsilon),
            opt(r.hitting_iteration),
            opt(r.hitting_evaluations),
            r.iteration_bound.to_string(),
            r.feval_bound.to_string(),
            r.within_bounds().to_string(),
        ])
        .map_err(to_err)?;
    }
    w.into_inner()
        .map_err(|e| HarnessError::write(SWEEP_CSV, e.into_error()))
}

/// Sweep a named problem and write `sweep.json` and `sweep.csv` into `out_dir`.
pub fn run_sweep(problem_name: &str, config: &SolverConfig, epsilons: &[f64], out_dir: &Path) -> Result<SweepResult> {
    let problem = problem(problem_name)?;
    let result = sweep_problem(&problem, config, epsilons)?;
    ensure_dir(out_dir)?;
    write_json(&out_dir.join(SWEEP_JSON), &result)?;
    write_bytes(&out_dir.join(SWEEP_CSV), &sweep_csv(&result)?)?;
    Ok(result)
}
