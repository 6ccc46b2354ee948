//! Per-iteration verification of the convergence invariants.
//!
//! A solve is driven one iteration at a time so that the iterate `x_k` is
//! known when its record arrives. Four invariants are checked on each row:
//!
//! * `gradient_bound`: `||grad f(x_k)||` against the bound in terms of the
//!   memory maximum after the iteration;
//! * `phi_decrease`: the merit function drops by the required amount;
//! * `memory_contraction`: an unsuccessful iteration shrinks the memory
//!   maximum by at least `theta`;
//! * `failure_evals`: an unsuccessful iteration costs exactly `2n` calls.
//!
//! Rows where the theory does not apply are marked skipped: the iteration
//! was cut short by the evaluation budget, a linesearch hit the step cap, or
//! `x_k` lies outside the region where the Lipschitz constant is valid.

use std::path::Path;

use lam_core::driver::{IterationRecord, Lam};
use lam_core::problems::TestProblem;
use lam_core::theory::{check_gradient_bound, check_phi_decrease, TheoryContext};
use lam_core::{SolveStatus, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::output::{ensure_dir, trace_csv, write_bytes, write_json};
use crate::runs::{oracle_for, problem, TRACE_FILE};

pub const VERIFY_FILE: &str = "verify.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckOutcome {
    Pass,
    Fail,
    Skip,
    NotApplicable,
}

impl CheckOutcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyStatus {
    Passed,
    Failed,
    Unverifiable,
}

impl VerifyStatus {
    /// Process exit code for the CLI.
    pub fn exit_code(self) -> i32 {
        match self {
            VerifyStatus::Passed => 0,
            VerifyStatus::Failed => 1,
            VerifyStatus::Unverifiable => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub k: u64,
    pub success: bool,
    pub gradient_bound: CheckOutcome,
    pub phi_decrease: CheckOutcome,
    pub memory_contraction: CheckOutcome,
    pub failure_evals: CheckOutcome,
    /// Reason the row was skipped, if it was.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<String>,
}

impl VerifyRow {
    pub fn outcomes(&self) -> [CheckOutcome; 4] {
        [
            self.gradient_bound,
            self.phi_decrease,
            self.memory_contraction,
            self.failure_evals,
        ]
    }

    pub fn any_failed(&self) -> bool {
        self.outcomes().contains(&CheckOutcome::Fail)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: u64,
    pub fail: u64,
    pub skip: u64,
    pub not_applicable: u64,
}

impl Tally {
    fn add(&mut self, outcome: CheckOutcome) {
        match outcome {
            CheckOutcome::Pass => self.pass += 1,
            CheckOutcome::Fail => self.fail += 1,
            CheckOutcome::Skip => self.skip += 1,
            CheckOutcome::NotApplicable => self.not_applicable += 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tallies {
    pub gradient_bound: Tally,
    pub phi_decrease: Tally,
    pub memory_contraction: Tally,
    pub failure_evals: Tally,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub problem: String,
    pub config: SolverConfig,
    /// The theta the checkers used, when it differs from the solver's.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checker_theta: Option<f64>,
    /// The Lipschitz constant the checkers used, when overridden.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checker_lipschitz: Option<f64>,
    pub status: VerifyStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub solve_status: Option<SolveStatus>,
    pub iterations: u64,
    pub tallies: Tallies,
    pub rows: Vec<VerifyRow>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyOptions {
    /// Check against a different theta than the solver used. A solver theta
    /// well above the checker's shows up in the merit and contraction checks.
    pub checker_theta: Option<f64>,
    /// Check against a different Lipschitz constant. Shrinking it far enough
    /// makes the gradient bound fail, since the bound is otherwise loose.
    pub checker_lipschitz: Option<f64>,
}

fn unverifiable(problem: &TestProblem, config: &SolverConfig, options: &VerifyOptions, reason: &str) -> VerifyReport {
    VerifyReport {
        problem: problem.name.clone(),
        config: config.clone(),
        checker_theta: options.checker_theta,
        checker_lipschitz: options.checker_lipschitz,
        status: VerifyStatus::Unverifiable,
        reason: Some(reason.to_string()),
        solve_status: None,
        iterations: 0,
        tallies: Tallies::default(),
        rows: Vec::new(),
    }
}

fn skip_reason(record: &IterationRecord, problem: &TestProblem, x_k: &[f64]) -> Option<&'static str> {
    if !record.complete {
        Some("evaluation budget cut the iteration short")
    } else if record.any_safety_stopped() {
        Some("a linesearch hit the step cap")
    } else if !problem.lipschitz_valid_at(x_k) {
        Some("iterate outside the Lipschitz region")
    } else {
        None
    }
}

fn check_row(record: &IterationRecord, ctx: &TheoryContext, grad: &[f64], phi_prev: f64, n: usize) -> VerifyRow {
    let failure_only = |ok: bool| {
        if record.success {
            CheckOutcome::NotApplicable
        } else {
            CheckOutcome::from_bool(ok)
        }
    };
    VerifyRow {
        k: record.k,
        success: record.success,
        gradient_bound: CheckOutcome::from_bool(check_gradient_bound(
            ctx,
            grad,
            record.max_tilde_alpha,
            record.success,
        )),
        phi_decrease: CheckOutcome::from_bool(check_phi_decrease(
            ctx,
            record.phi,
            phi_prev,
            record.max_tilde_alpha,
            record.success,
        )),
        memory_contraction: failure_only(record.max_tilde_alpha <= ctx.theta * record.max_tilde_alpha_prev),
        failure_evals: failure_only(record.evals == 2 * n as u64),
        skip_reason: None,
    }
}

/// Verify a solve of `problem` under `config`, returning the full report
/// along with the raw trace.
pub fn verify_problem(
    problem: &TestProblem,
    config: &SolverConfig,
    options: &VerifyOptions,
) -> Result<(VerifyReport, Vec<IterationRecord>, Option<TheoryContext>)> {
    config.validate()?;
    let (Some(gradient), Some(lipschitz), Some(f_min)) = (problem.gradient.clone(), problem.lipschitz, problem.f_min)
    else {
        let reason = "the problem lacks an analytic gradient, a Lipschitz constant or a lower bound";
        return Ok((unverifiable(problem, config, options, reason), Vec::new(), None));
    };

    let mut checker_config = config.clone();
    if let Some(theta) = options.checker_theta {
        checker_config.theta = theta;
    }
    let lipschitz = options.checker_lipschitz.unwrap_or(lipschitz);
    let ctx = TheoryContext::new(
        problem.dim,
        lipschitz,
        &checker_config,
        f_min,
        problem.value(&problem.x0),
    )?;

    let grad_fn = gradient.clone();
    let mut lam =
        Lam::new(problem.x0.clone(), oracle_for(problem), config.clone())?.with_gradient(move |x: &[f64]| grad_fn(x));
    let mut phi_prev = lam.phi0();
    let mut rows = Vec::new();
    let mut trace = Vec::new();
    let mut tallies = Tallies::default();

    let solve_status = loop {
        if let Some(status) = lam.stop_reason() {
            break status;
        }
        let x_k = lam.state().x.clone();
        let record = lam.step();
        let row = match skip_reason(&record, problem, &x_k) {
            Some(reason) => VerifyRow {
                k: record.k,
                success: record.success,
                gradient_bound: CheckOutcome::Skip,
                phi_decrease: CheckOutcome::Skip,
                memory_contraction: CheckOutcome::Skip,
                failure_evals: CheckOutcome::Skip,
                skip_reason: Some(reason.to_string()),
            },
            None => check_row(&record, &ctx, &gradient(&x_k), phi_prev, problem.dim),
        };
        tallies.gradient_bound.add(row.gradient_bound);
        tallies.phi_decrease.add(row.phi_decrease);
        tallies.memory_contraction.add(row.memory_contraction);
        tallies.failure_evals.add(row.failure_evals);
        phi_prev = record.phi;
        let (complete, capped) = (record.complete, record.all_safety_stopped());
        rows.push(row);
        trace.push(record);
        if !complete {
            break SolveStatus::EvaluationBudget;
        }
        if capped {
            break SolveStatus::StepCapReached;
        }
    };

    let status = if rows.iter().any(VerifyRow::any_failed) {
        VerifyStatus::Failed
    } else {
        VerifyStatus::Passed
    };
    let report = VerifyReport {
        problem: problem.name.clone(),
        config: config.clone(),
        checker_theta: options.checker_theta,
        checker_lipschitz: options.checker_lipschitz,
        status,
        reason: None,
        solve_status: Some(solve_status),
        iterations: rows.len() as u64,
        tallies,
        rows,
    };
    Ok((report, trace, Some(ctx)))
}

/// Verify a named problem and write `verify.json` (and `trace.csv` when a
/// solve ran) into `out_dir`.
pub fn run_verify(
    problem_name: &str,
    config: &SolverConfig,
    options: &VerifyOptions,
    out_dir: &Path,
) -> Result<VerifyReport> {
    let problem = problem(problem_name)?;
    let (report, trace, ctx) = verify_problem(&problem, config, options)?;
    ensure_dir(out_dir)?;
    write_json(&out_dir.join(VERIFY_FILE), &report)?;
    if report.status != VerifyStatus::Unverifiable {
        write_bytes(&out_dir.join(TRACE_FILE), &trace_csv(&trace, ctx.as_ref())?)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lam_core::problems;
    use lam_core::{Driver, LinesearchVariant};

    #[test]
    fn sphere_passes_every_configuration() {
        for variant in [LinesearchVariant::Standard, LinesearchVariant::New] {
            for driver in [Driver::Chained, Driver::Modified] {
                let cfg = SolverConfig::default().with_variant(variant).with_driver(driver);
                let (report, _, _) = verify_problem(&problems::sphere(2), &cfg, &VerifyOptions::default()).unwrap();
                assert_eq!(report.status, VerifyStatus::Passed, "{variant:?}/{driver:?}");
                assert!(report.tallies.gradient_bound.pass > 0);
                assert_eq!(report.tallies.gradient_bound.skip, 0);
            }
        }
    }

    #[test]
    fn mismatched_theta_is_caught() {
        let cfg = SolverConfig {
            theta: 0.9,
            ..Default::default()
        };
        let options = VerifyOptions {
            checker_theta: Some(0.1),
            ..Default::default()
        };
        let (report, _, _) = verify_problem(&problems::sphere(2), &cfg, &options).unwrap();
        assert_eq!(report.status, VerifyStatus::Failed);
        assert!(report.tallies.memory_contraction.fail > 0);
        assert!(report.tallies.phi_decrease.fail > 0);
    }

    #[test]
    fn shrunken_lipschitz_breaks_the_gradient_bound() {
        let options = VerifyOptions {
            checker_lipschitz: Some(1e-3),
            ..Default::default()
        };
        let (report, _, _) = verify_problem(&problems::sphere(2), &SolverConfig::default(), &options).unwrap();
        assert_eq!(report.status, VerifyStatus::Failed);
        assert!(report.tallies.gradient_bound.fail > 0);
    }

    #[test]
    fn quartic_is_unverifiable() {
        let (report, trace, ctx) = verify_problem(
            &problems::quartic(2),
            &SolverConfig::default(),
            &VerifyOptions::default(),
        )
        .unwrap();
        assert_eq!(report.status, VerifyStatus::Unverifiable);
        assert_eq!(report.status.exit_code(), 2);
        assert!(trace.is_empty() && ctx.is_none());
    }

    #[test]
    fn rows_outside_the_lipschitz_box_are_skipped() {
        let mut p = problems::rosenbrock();
        p.x0 = lam_core::Vector::new(vec![-3.5, 4.0]).unwrap();
        let (report, _, _) = verify_problem(&p, &SolverConfig::default(), &VerifyOptions::default()).unwrap();
        let first = &report.rows[0];
        assert_eq!(first.gradient_bound, CheckOutcome::Skip);
        assert_eq!(
            first.skip_reason.as_deref(),
            Some("iterate outside the Lipschitz region")
        );
        assert_ne!(report.status, VerifyStatus::Failed);
    }

    #[test]
    fn budget_cut_rows_are_skipped() {
        let mut cfg = SolverConfig::default();
        cfg.stop.max_evaluations = Some(4);
        let (report, _, _) = verify_problem(&problems::sphere(4), &cfg, &VerifyOptions::default()).unwrap();
        assert_eq!(report.solve_status, Some(SolveStatus::EvaluationBudget));
        let last = report.rows.last().unwrap();
        assert_eq!(last.outcomes(), [CheckOutcome::Skip; 4]);
    }
}
