use std::cell::Cell;

use lam_core::problems::{self, TestProblem};
use lam_core::{
    solve, CountingOracle, Driver, IterationRecord, LinesearchVariant, SolveResult, SolveStatus, SolverConfig, Vector,
};
use proptest::prelude::*;

const ABS_SLACK: f64 = 1e-12;

fn configs() -> Vec<SolverConfig> {
    let mut out = Vec::new();
    for variant in [LinesearchVariant::Standard, LinesearchVariant::New] {
        for driver in [Driver::Chained, Driver::Modified] {
            out.push(SolverConfig::default().with_variant(variant).with_driver(driver));
        }
    }
    out
}

fn run(problem: &TestProblem, cfg: &SolverConfig) -> SolveResult {
    let f = problem.objective.clone();
    solve(
        problem.x0.clone(),
        CountingOracle::new(problem.dim, move |x: &[f64]| f(x)),
        cfg,
    )
    .unwrap()
}

/// Invariants every complete trace row must satisfy.
fn check_trace(res: &SolveResult, cfg: &SolverConfig, n: usize) -> std::result::Result<(), String> {
    let mut prev_f = f64::INFINITY;
    let mut prev_memory: Option<&[f64]> = None;
    for rec in &res.trace {
        if rec.f_x > prev_f {
            return Err(format!("f increased at k = {}", rec.k));
        }
        prev_f = rec.f_x;
        if rec.f_next > rec.f_x {
            return Err(format!("f_next > f_x at k = {}", rec.k));
        }
        if rec.success != !rec.successful_coords().is_empty() {
            return Err(format!("success flag mismatch at k = {}", rec.k));
        }
        if let Some(prev) = prev_memory {
            let m = prev.iter().copied().fold(0.0, f64::max);
            if m != rec.max_tilde_alpha_prev {
                return Err(format!("memory bookkeeping mismatch at k = {}", rec.k));
            }
        }
        prev_memory = Some(&rec.tilde_alpha);
        if rec.tilde_alpha.iter().any(|&a| a.is_nan() || a <= 0.0) {
            return Err(format!("nonpositive memory at k = {}", rec.k));
        }
        if !rec.complete {
            continue;
        }
        check_row(rec, cfg, n)?;
    }
    Ok(())
}

fn check_row(rec: &IterationRecord, cfg: &SolverConfig, n: usize) -> std::result::Result<(), String> {
    let m_prev = rec.max_tilde_alpha_prev;
    if rec.success {
        let required = rec.f_x - cfg.gamma * cfg.c * cfg.c * m_prev * m_prev;
        if rec.f_next > required + ABS_SLACK {
            return Err(format!("insufficient decrease at k = {}", rec.k));
        }
    } else {
        if rec.max_tilde_alpha > cfg.theta * m_prev {
            return Err(format!("memory did not contract at k = {}", rec.k));
        }
        if rec.evals != 2 * n as u64 {
            return Err(format!("failed iteration used {} evals, n = {n}", rec.evals));
        }
    }
    let mut displacement2: f64 = 0.0;
    for (idx, c) in rec.coords.iter().enumerate() {
        if c.is_success() && c.f_end > c.f_start - cfg.gamma * c.tentative * c.tentative {
            return Err(format!("coordinate {idx} decrease too small at k = {}", rec.k));
        }
        if !c.is_success() && c.f_end != c.f_start {
            return Err(format!("failed coordinate moved at k = {}", rec.k));
        }
        if cfg.driver == Driver::Chained {
            if idx > 0 && c.f_start != rec.coords[idx - 1].f_end {
                return Err(format!("chain broken at k = {}", rec.k));
            }
            // ||x_k - y_k^i|| <= sqrt(n) max tilde_alpha_{k+1}
            if displacement2.sqrt() > (n as f64).sqrt() * rec.max_tilde_alpha {
                return Err(format!("chain displacement bound violated at k = {}", rec.k));
            }
            displacement2 += c.alpha * c.alpha;
        } else if c.f_start != rec.f_x {
            return Err(format!("modified driver left x_k at k = {}", rec.k));
        }
    }
    Ok(())
}

#[test]
fn suite_traces_satisfy_descent_invariants() {
    for problem in problems::suite() {
        for cfg in configs() {
            let res = run(&problem, &cfg);
            check_trace(&res, &cfg, problem.dim)
                .unwrap_or_else(|e| panic!("{} {:?}/{:?}: {e}", problem.name, cfg.variant, cfg.driver));
        }
    }
}

#[test]
fn step_memory_vanishes_on_suite() {
    for problem in problems::suite() {
        for cfg in configs() {
            let res = run(&problem, &cfg);
            assert_eq!(
                res.status,
                SolveStatus::StepToleranceReached,
                "{} {:?}/{:?}",
                problem.name,
                cfg.variant,
                cfg.driver
            );
            assert!(res.trace.last().unwrap().max_tilde_alpha <= 1e-8);
        }
    }
}

#[test]
fn sphere_reaches_tiny_objective() {
    let res = run(&problems::sphere(2), &SolverConfig::default());
    assert!(res.f_final <= 1e-12);
}

#[test]
fn identical_runs_are_bit_identical() {
    for cfg in configs() {
        let p = problems::rosenbrock();
        let a = run(&p, &cfg);
        let b = run(&p, &cfg);
        assert_eq!(a, b);
    }
}

fn random_quadratic(n: usize, diag: Vec<f64>, off: f64, centre: Vec<f64>) -> impl Fn(&[f64]) -> f64 {
    // diagonally dominant, hence positive definite
    move |x: &[f64]| {
        let mut total = 0.0;
        for i in 0..n {
            let di = x[i] - centre[i];
            total += diag[i] * di * di;
            if i + 1 < n {
                total += off * di * (x[i + 1] - centre[i + 1]);
            }
        }
        total
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_accounting_is_exact(
        n in 1usize..5,
        diag in prop::collection::vec(1.0f64..10.0, 4),
        off in -0.9f64..0.9,
        centre in prop::collection::vec(-5.0f64..5.0, 4),
        x0 in prop::collection::vec(-5.0f64..5.0, 4),
        variant in prop_oneof![Just(LinesearchVariant::Standard), Just(LinesearchVariant::New)],
        driver in prop_oneof![Just(Driver::Chained), Just(Driver::Modified)],
        max_evals in prop_oneof![Just(None), (1u64..300).prop_map(Some)],
        alpha0 in 0.01f64..5.0,
    ) {
        let calls = Cell::new(0u64);
        let f = random_quadratic(n, diag[..n].to_vec(), off, centre[..n].to_vec());
        let counted = |x: &[f64]| {
            calls.set(calls.get() + 1);
            f(x)
        };
        let mut cfg = SolverConfig { alpha0, ..Default::default() }.with_variant(variant).with_driver(driver);
        cfg.stop.max_evaluations = max_evals;
        cfg.stop.max_iterations = Some(5_000);
        let res = solve(Vector::new(x0[..n].to_vec()).unwrap(), CountingOracle::new(n, counted), &cfg).unwrap();

        prop_assert_eq!(res.evaluations, calls.get());
        if let Some(last) = res.trace.last() {
            prop_assert_eq!(last.evals_cum, calls.get());
        }
        prop_assert_eq!(res.f_final, f(&res.x_final));
        let evals: u64 = res.trace.iter().map(|r| r.evals).sum();
        prop_assert_eq!(evals + 1, calls.get());
        check_trace(&res, &cfg, n).map_err(TestCaseError::fail)?;
    }
}
