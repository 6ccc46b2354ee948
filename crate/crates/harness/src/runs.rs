//! Plain solves on named problems.

use std::path::Path;

use lam_core::driver::{Lam, SolveResult};
use lam_core::problems::{self, TestProblem};
use lam_core::theory::TheoryContext;
use lam_core::{CountingOracle, SolverConfig};

use crate::error::{HarnessError, Result};
use crate::output::{ensure_dir, trace_csv, write_bytes, write_json, SolveSummary};

pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.json";

pub fn problem(name: &str) -> Result<TestProblem> {
    problems::by_name(name).ok_or_else(|| HarnessError::UnknownProblem(name.to_string()))
}

/// Counting oracle over a suite problem's objective.
pub fn oracle_for(problem: &TestProblem) -> CountingOracle<impl Fn(&[f64]) -> f64 + Send + Sync> {
    let f = problem.objective.clone();
    CountingOracle::new(problem.dim, move |x: &[f64]| f(x))
}

/// Theory context for `problem`, when its Lipschitz constant and minimum are known.
pub fn theory_for(problem: &TestProblem, config: &SolverConfig) -> Option<TheoryContext> {
    let lipschitz = problem.lipschitz?;
    let f_min = problem.f_min?;
    TheoryContext::new(problem.dim, lipschitz, config, f_min, problem.value(&problem.x0)).ok()
}

/// Solve `problem` from its default start, measuring the gradient norm along
/// the way when an analytic gradient exists.
pub fn solve_problem(problem: &TestProblem, config: &SolverConfig) -> Result<SolveResult> {
    let mut lam = Lam::new(problem.x0.clone(), oracle_for(problem), config.clone())?;
    if let Some(g) = problem.gradient.clone() {
        lam = lam.with_gradient(move |x: &[f64]| g(x));
    }
    Ok(lam.run())
}

/// Solve and write `trace.csv` and `summary.json` into `out_dir`.
pub fn run_solve(problem_name: &str, config: &SolverConfig, out_dir: &Path) -> Result<SolveResult> {
    let problem = problem(problem_name)?;
    let result = solve_problem(&problem, config)?;
    ensure_dir(out_dir)?;
    let theory = theory_for(&problem, config);
    write_bytes(&out_dir.join(TRACE_FILE), &trace_csv(&result.trace, theory.as_ref())?)?;
    write_json(
        &out_dir.join(SUMMARY_FILE),
        &SolveSummary::new(&problem.name, config, &result),
    )?;
    Ok(result)
}
