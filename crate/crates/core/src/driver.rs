//! Outer iteration of the linesearch algorithm model.
//!
//! Each iteration visits coordinates `0..n` once. Coordinate `i` gets the
//! tentative step `max(tilde_alpha[i], c * max_j tilde_alpha[j])`, computed
//! from the memory as it was when the iteration started, runs a
//! [`df_linesearch`] and stores the outcome back into the memory.
//!
//! * [`Driver::Chained`] starts each linesearch at the end point of the
//!   previous one and takes the last point as the next iterate.
//! * [`Driver::Modified`] starts every linesearch at the iterate and moves to
//!   the best end point (smallest coordinate index on ties).

use serde::{Deserialize, Serialize};

use crate::config::{Driver, SolverConfig};
use crate::error::{Error, Result};
use crate::linesearch::{df_linesearch, LinesearchResult};
use crate::oracle::CountingOracle;
use crate::theory::lyapunov_phi;
use crate::types::{norm2, shifted, Sign, StepMemory, Vector};

/// `max(tilde_alpha[i], c * max_j tilde_alpha[j])`.
pub fn tentative_step(mem: &StepMemory, i: usize, c: f64) -> f64 {
    mem.step(i).max(c * mem.max())
}

/// Store the linesearch outcome for coordinate `i`: the accepted step on
/// success, `theta * abar` on failure.
pub fn update_memory(mem: &mut StepMemory, i: usize, abar: f64, result: &LinesearchResult, theta: f64) {
    let step = if result.is_success() {
        result.alpha
    } else {
        theta * abar
    };
    mem.set(i, step, result.sign_out);
}

/// What happened along one coordinate during an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordinateOutcome {
    pub index: usize,
    /// False when the evaluation budget ran out before this coordinate.
    pub attempted: bool,
    /// Tentative step handed to the linesearch.
    pub tentative: f64,
    /// Accepted step, zero on failure or when not attempted.
    pub alpha: f64,
    /// Direction sign after the linesearch.
    pub sign: Sign,
    pub expansions: u32,
    pub evals: u32,
    /// Objective at the linesearch start point.
    pub f_start: f64,
    /// Objective at the linesearch end point.
    pub f_end: f64,
    pub safety_stopped: bool,
}

impl CoordinateOutcome {
    pub fn is_success(&self) -> bool {
        self.alpha > 0.0
    }
}

/// One row of the solver trace, describing iteration `k` (from `x_k` to `x_{k+1}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: u64,
    /// `f(x_k)`.
    pub f_x: f64,
    /// `f(x_{k+1})`.
    pub f_next: f64,
    /// `max_i tilde_alpha_k^i`, before the iteration.
    pub max_tilde_alpha_prev: f64,
    /// `max_i tilde_alpha_{k+1}^i`, after the iteration.
    pub max_tilde_alpha: f64,
    /// Memory after the iteration.
    pub tilde_alpha: Vec<f64>,
    /// Merit value at `x_{k+1}` with the updated memory.
    pub phi: f64,
    /// `x_{k+1} != x_k`.
    pub success: bool,
    /// False if the evaluation budget cut the iteration short.
    pub complete: bool,
    pub coords: Vec<CoordinateOutcome>,
    /// Oracle calls made during this iteration.
    pub evals: u64,
    /// Oracle calls made since the solver was created, including `f(x_0)`.
    pub evals_cum: u64,
    /// `||grad f(x_k)||`, when a measurement gradient was supplied.
    pub grad_norm: Option<f64>,
}

impl IterationRecord {
    pub fn successful_coords(&self) -> Vec<usize> {
        self.coords.iter().filter(|c| c.is_success()).map(|c| c.index).collect()
    }

    pub fn expansions(&self) -> Vec<u32> {
        self.coords.iter().map(|c| c.expansions).collect()
    }

    pub fn all_safety_stopped(&self) -> bool {
        self.coords.iter().all(|c| c.safety_stopped)
    }

    pub fn any_safety_stopped(&self) -> bool {
        self.coords.iter().any(|c| c.safety_stopped)
    }
}

/// Iterate, its objective value and the step memory.
#[derive(Debug, Clone, PartialEq)]
pub struct LamState {
    pub x: Vector,
    pub f_x: f64,
    pub memory: StepMemory,
    pub k: u64,
}

impl LamState {
    /// Evaluate `f(x0)` and build the uniform initial memory.
    pub fn init<F>(x0: Vector, oracle: &mut CountingOracle<F>, alpha0: f64) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let f_x = oracle.evaluate(&x0)?.ok_or(Error::NonFiniteStart)?;
        oracle.set_incumbent(&x0, f_x);
        let memory = StepMemory::uniform(x0.dim(), alpha0)?;
        Ok(Self {
            x: x0,
            f_x,
            memory,
            k: 0,
        })
    }
}

/// One iteration of the chained driver, ignoring evaluation budgets.
pub fn iterate_chained<F>(
    state: &mut LamState,
    oracle: &mut CountingOracle<F>,
    config: &SolverConfig,
) -> IterationRecord
where
    F: Fn(&[f64]) -> f64,
{
    run_iteration(state, oracle, config, Driver::Chained, None)
}

/// One iteration of the modified driver, ignoring evaluation budgets.
pub fn iterate_modified<F>(
    state: &mut LamState,
    oracle: &mut CountingOracle<F>,
    config: &SolverConfig,
) -> IterationRecord
where
    F: Fn(&[f64]) -> f64,
{
    run_iteration(state, oracle, config, Driver::Modified, None)
}

fn run_iteration<F>(
    state: &mut LamState,
    oracle: &mut CountingOracle<F>,
    config: &SolverConfig,
    driver: Driver,
    eval_limit: Option<u64>,
) -> IterationRecord
where
    F: Fn(&[f64]) -> f64,
{
    let n = state.x.dim();
    let snapshot = state.memory.clone();
    let evals_before = oracle.eval_count();

    // Chain point: moves along with successes in the chained driver, stays at
    // x_k in the modified one.
    let mut y = state.x.as_slice().to_vec();
    let mut f_y = state.f_x;
    // Best end point seen so far in the modified driver.
    let mut best: Option<(usize, Vec<f64>, f64)> = None;

    let mut coords = Vec::with_capacity(n);
    let mut complete = true;
    for i in 0..n {
        let abar = tentative_step(&snapshot, i, config.c);
        if complete && eval_limit.is_some_and(|limit| oracle.eval_count() >= limit) {
            complete = false;
        }
        if !complete {
            coords.push(CoordinateOutcome {
                index: i,
                attempted: false,
                tentative: abar,
                alpha: 0.0,
                sign: state.memory.sign(i),
                expansions: 0,
                evals: 0,
                f_start: f_y,
                f_end: f_y,
                safety_stopped: false,
            });
            continue;
        }

        oracle.set_incumbent(&y, f_y);
        let result = df_linesearch(config.variant, oracle, &y, f_y, i, state.memory.sign(i), abar, config)
            .expect("chain point has the oracle dimension");
        update_memory(&mut state.memory, i, abar, &result, config.theta);
        coords.push(CoordinateOutcome {
            index: i,
            attempted: true,
            tentative: abar,
            alpha: result.alpha,
            sign: result.sign_out,
            expansions: result.expansions,
            evals: result.evals_used,
            f_start: f_y,
            f_end: result.f_end,
            safety_stopped: result.safety_stopped,
        });

        if result.is_success() {
            let step = result.alpha * result.sign_out.value();
            match driver {
                Driver::Chained => {
                    y[i] += step;
                    f_y = result.f_end;
                }
                Driver::Modified => {
                    if best.as_ref().is_none_or(|(_, _, f_best)| result.f_end < *f_best) {
                        best = Some((i, shifted(&y, i, step), result.f_end));
                    }
                }
            }
        }
    }

    let f_x = state.f_x;
    let (x_next, f_next) = match driver {
        Driver::Chained => (y, f_y),
        Driver::Modified => match best {
            // A successful end point is strictly below f(x_k), so it beats
            // every unsuccessful candidate x_k.
            Some((_, point, value)) if value < f_x => (point, value),
            _ => (y, f_y),
        },
    };
    let success = coords.iter().any(CoordinateOutcome::is_success);
    state.x = Vector::new(x_next).expect("iterates stay finite");
    state.f_x = f_next;
    oracle.set_incumbent(&state.x, f_next);

    let record = IterationRecord {
        k: state.k,
        f_x,
        f_next,
        max_tilde_alpha_prev: snapshot.max(),
        max_tilde_alpha: state.memory.max(),
        tilde_alpha: state.memory.steps().to_vec(),
        phi: lyapunov_phi(f_next, state.memory.max(), config.gamma, config.c),
        success,
        complete,
        coords,
        evals: oracle.eval_count() - evals_before,
        evals_cum: oracle.eval_count(),
        grad_norm: None,
    };
    state.k += 1;
    record
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    StepToleranceReached,
    IterationBudget,
    EvaluationBudget,
    /// Every coordinate of the last iteration hit the `max_step` cap.
    StepCapReached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub x_final: Vector,
    pub f_final: f64,
    pub iterations: u64,
    pub evaluations: u64,
    pub status: SolveStatus,
    /// Merit value at the starting point.
    pub phi0: f64,
    pub trace: Vec<IterationRecord>,
}

type MeasurementGradient<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>;

/// A running solve: owns the oracle and the iteration state.
pub struct Lam<'a, F> {
    oracle: CountingOracle<F>,
    config: SolverConfig,
    state: LamState,
    phi0: f64,
    gradient: Option<MeasurementGradient<'a>>,
}

impl<'a, F> Lam<'a, F>
where
    F: Fn(&[f64]) -> f64,
{
    /// Validate the configuration and evaluate `f(x0)` (one oracle call).
    pub fn new(x0: Vector, mut oracle: CountingOracle<F>, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        if x0.dim() != oracle.dim() {
            return Err(Error::DimensionMismatch {
                expected: oracle.dim(),
                got: x0.dim(),
            });
        }
        let state = LamState::init(x0, &mut oracle, config.alpha0)?;
        let phi0 = lyapunov_phi(state.f_x, state.memory.max(), config.gamma, config.c);
        Ok(Self {
            oracle,
            config,
            state,
            phi0,
            gradient: None,
        })
    }

    /// Attach a gradient used only to fill `grad_norm` in the trace. The
    /// solver never sees it and it does not count as an evaluation.
    pub fn with_gradient(mut self, gradient: impl Fn(&[f64]) -> Vec<f64> + 'a) -> Self {
        self.gradient = Some(Box::new(gradient));
        self
    }

    pub fn state(&self) -> &LamState {
        &self.state
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn evaluations(&self) -> u64 {
        self.oracle.eval_count()
    }

    pub fn oracle(&self) -> &CountingOracle<F> {
        &self.oracle
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn phi(&self) -> f64 {
        lyapunov_phi(
            self.state.f_x,
            self.state.memory.max(),
            self.config.gamma,
            self.config.c,
        )
    }

    /// Norm of the measurement gradient at the current iterate.
    pub fn gradient_norm(&self) -> Option<f64> {
        self.gradient.as_ref().map(|g| norm2(&g(&self.state.x)))
    }

    /// The stopping rule that currently applies, if any.
    pub fn stop_reason(&self) -> Option<SolveStatus> {
        let stop = &self.config.stop;
        if stop.step_tolerance > 0.0 && self.state.memory.max() <= stop.step_tolerance {
            Some(SolveStatus::StepToleranceReached)
        } else if stop.max_iterations.is_some_and(|m| self.state.k >= m) {
            Some(SolveStatus::IterationBudget)
        } else if stop.max_evaluations.is_some_and(|m| self.oracle.eval_count() >= m) {
            Some(SolveStatus::EvaluationBudget)
        } else {
            None
        }
    }

    /// Run one iteration. Coordinates are skipped once the evaluation budget
    /// is used up, so a single linesearch may overshoot it.
    pub fn step(&mut self) -> IterationRecord {
        let grad_norm = self.gradient_norm();
        let mut record = run_iteration(
            &mut self.state,
            &mut self.oracle,
            &self.config,
            self.config.driver,
            self.config.stop.max_evaluations,
        );
        record.grad_norm = grad_norm;
        record
    }

    /// Iterate until a stopping rule fires.
    pub fn run(mut self) -> SolveResult {
        let mut trace = Vec::new();
        let status = loop {
            if let Some(status) = self.stop_reason() {
                break status;
            }
            let record = self.step();
            let (complete, capped) = (record.complete, record.all_safety_stopped());
            trace.push(record);
            if !complete {
                break SolveStatus::EvaluationBudget;
            }
            if capped {
                break SolveStatus::StepCapReached;
            }
        };
        SolveResult {
            x_final: self.state.x,
            f_final: self.state.f_x,
            iterations: trace.len() as u64,
            evaluations: self.oracle.eval_count(),
            status,
            phi0: self.phi0,
            trace,
        }
    }
}

/// Minimise the objective behind `oracle` from `x0`.
pub fn solve<F>(x0: Vector, oracle: CountingOracle<F>, config: &SolverConfig) -> Result<SolveResult>
where
    F: Fn(&[f64]) -> f64,
{
    Ok(Lam::new(x0, oracle, config.clone())?.run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::LinesearchVariant;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn traced_config(variant: LinesearchVariant) -> SolverConfig {
        SolverConfig {
            c: 0.5,
            theta: 0.5,
            gamma: 0.1,
            delta: 0.5,
            variant,
            ..Default::default()
        }
    }

    fn state(x: Vec<f64>, f_x: f64, steps: Vec<f64>) -> LamState {
        let n = steps.len();
        LamState {
            x: Vector::new(x).unwrap(),
            f_x,
            memory: StepMemory::from_parts(steps, vec![Sign::Plus; n]).unwrap(),
            k: 0,
        }
    }

    #[test]
    fn tentative_step_examples() {
        let mem = StepMemory::from_parts(vec![0.1, 1.0], vec![Sign::Plus; 2]).unwrap();
        assert_eq!(tentative_step(&mem, 0, 0.5), 0.5);
        let mem = StepMemory::uniform(2, 1.0).unwrap();
        assert_eq!(tentative_step(&mem, 0, 0.5), 1.0);
        let mem = StepMemory::from_parts(vec![2.0, 0.3], vec![Sign::Plus; 2]).unwrap();
        assert!((tentative_step(&mem, 1, 0.9) - 1.8).abs() < 1e-15);
    }

    #[test]
    fn update_memory_examples() {
        let mut mem = StepMemory::uniform(2, 1.0).unwrap();
        let fail = LinesearchResult {
            alpha: 0.0,
            sign_out: Sign::Plus,
            expansions: 0,
            evals_used: 2,
            f_end: 0.0,
            safety_stopped: false,
        };
        update_memory(&mut mem, 0, 0.4, &fail, 0.5);
        assert_eq!(mem.step(0), 0.2);

        let ok = LinesearchResult {
            alpha: 1.0,
            sign_out: Sign::Minus,
            expansions: 1,
            ..fail
        };
        update_memory(&mut mem, 1, 0.5, &ok, 0.5);
        assert_eq!((mem.step(1), mem.sign(1)), (1.0, Sign::Minus));

        let keep = LinesearchResult {
            alpha: 0.5,
            expansions: 0,
            ..ok
        };
        update_memory(&mut mem, 1, 0.5, &keep, 0.5);
        assert_eq!(mem.step(1), 0.5);
    }

    #[test]
    fn chained_at_minimizer_contracts_uniformly() {
        let cfg = traced_config(LinesearchVariant::Standard);
        let mut oracle = CountingOracle::new(2, sphere);
        let mut st = state(vec![0.0, 0.0], 0.0, vec![0.8, 0.8]);
        let rec = iterate_chained(&mut st, &mut oracle, &cfg);
        assert!(!rec.success);
        assert_eq!(st.x.as_slice(), &[0.0, 0.0]);
        assert_eq!(st.memory.steps(), &[0.4, 0.4]);
        assert_eq!(rec.evals, 4);
    }

    #[test]
    fn chained_hand_trace_on_sphere() {
        let cfg = traced_config(LinesearchVariant::Standard);
        let mut oracle = CountingOracle::new(2, sphere);
        let mut st = state(vec![1.0, 1.0], 2.0, vec![0.5, 0.5]);
        let rec = iterate_chained(&mut st, &mut oracle, &cfg);
        assert_eq!(st.x.as_slice(), &[0.0, 0.0]);
        assert_eq!(st.f_x, 0.0);
        assert_eq!(st.memory.steps(), &[1.0, 1.0]);
        assert_eq!(st.memory.signs(), &[Sign::Minus, Sign::Minus]);
        assert_eq!(rec.successful_coords(), vec![0, 1]);
        assert_eq!(rec.expansions(), vec![1, 1]);
        assert_eq!((rec.f_x, rec.f_next), (2.0, 0.0));
        assert_eq!(rec.evals, 8);
    }

    #[test]
    fn modified_hand_trace_breaks_ties_by_index() {
        let cfg = traced_config(LinesearchVariant::Standard);
        let mut oracle = CountingOracle::new(2, sphere);
        let mut st = state(vec![1.0, 1.0], 2.0, vec![0.5, 0.5]);
        let rec = iterate_modified(&mut st, &mut oracle, &cfg);
        assert_eq!(st.x.as_slice(), &[0.0, 1.0]);
        assert_eq!(st.f_x, 1.0);
        assert_eq!(rec.successful_coords(), vec![0, 1]);
        assert_eq!(st.memory.steps(), &[1.0, 1.0]);
    }

    #[test]
    fn modified_single_success_moves_there() {
        // only the second coordinate has slope
        let f = |x: &[f64]| x[0] * x[0] + (x[1] - 3.0).powi(2);
        let cfg = traced_config(LinesearchVariant::New);
        let mut oracle = CountingOracle::new(2, f);
        let mut st = state(vec![0.0, 0.0], 9.0, vec![1.0, 1.0]);
        let rec = iterate_modified(&mut st, &mut oracle, &cfg);
        assert_eq!(rec.successful_coords(), vec![1]);
        assert_eq!(st.x[0], 0.0);
        assert!(st.x[1] > 0.0);
        assert_eq!(st.f_x, f(&st.x));
    }

    #[test]
    fn one_dimensional_iteration_is_a_single_linesearch() {
        let cfg = traced_config(LinesearchVariant::Standard);
        let mut oracle = CountingOracle::new(1, sphere);
        let mut st = state(vec![1.0], 1.0, vec![0.5]);
        let rec = iterate_chained(&mut st, &mut oracle, &cfg);
        assert_eq!(rec.coords.len(), 1);
        assert_eq!(st.x.as_slice(), &[0.0]);
        assert_eq!(st.memory.step(0), 1.0);
        assert_eq!(rec.evals, 4);
    }

    #[test]
    fn tentative_steps_use_iteration_start_memory() {
        // coordinate 0 fails first; coordinate 1 must still see max = 1.0
        let f = |x: &[f64]| x[0] * x[0] + (x[1] - 5.0).powi(2);
        let cfg = traced_config(LinesearchVariant::Standard);
        let mut oracle = CountingOracle::new(2, f);
        let mut st = state(vec![0.0, 0.0], 25.0, vec![1.0, 0.1]);
        let rec = iterate_chained(&mut st, &mut oracle, &cfg);
        assert_eq!(rec.coords[1].tentative, 0.5);
    }

    #[test]
    fn solve_sphere_to_step_tolerance() {
        let cfg = SolverConfig::default();
        let res = solve(Vector::filled(2, 1.0).unwrap(), CountingOracle::new(2, sphere), &cfg).unwrap();
        assert_eq!(res.status, SolveStatus::StepToleranceReached);
        assert!(res.f_final <= 1e-12);
        assert!(res.trace.last().unwrap().max_tilde_alpha <= 1e-8);
        assert_eq!(res.trace.len() as u64, res.iterations);
    }

    #[test]
    fn zero_iteration_budget_returns_start() {
        let mut cfg = SolverConfig::default();
        cfg.stop.max_iterations = Some(0);
        let x0 = Vector::new(vec![1.0, -2.0]).unwrap();
        let res = solve(x0.clone(), CountingOracle::new(2, sphere), &cfg).unwrap();
        assert_eq!(res.status, SolveStatus::IterationBudget);
        assert_eq!(res.x_final, x0);
        assert_eq!(res.iterations, 0);
        assert_eq!(res.evaluations, 1);
    }

    #[test]
    fn evaluation_budget_stops_mid_iteration() {
        let mut cfg = SolverConfig::default();
        cfg.stop.max_evaluations = Some(10);
        let res = solve(Vector::filled(4, 3.0).unwrap(), CountingOracle::new(4, sphere), &cfg).unwrap();
        assert_eq!(res.status, SolveStatus::EvaluationBudget);
        let last = res.trace.last().unwrap();
        assert!(!last.complete);
        assert!(last.coords.iter().any(|c| !c.attempted));
        assert_eq!(res.f_final, sphere(&res.x_final));
    }

    #[test]
    fn unbounded_objective_hits_step_cap() {
        let mut cfg = SolverConfig::default();
        cfg.stop.max_step = 1e3;
        let res = solve(
            Vector::zeros(2).unwrap(),
            CountingOracle::new(2, |x: &[f64]| -x[0] - x[1]),
            &cfg,
        )
        .unwrap();
        assert_eq!(res.status, SolveStatus::StepCapReached);
        assert!(res.trace.last().unwrap().coords.iter().all(|c| c.safety_stopped));
    }

    #[test]
    fn non_finite_start_is_rejected() {
        let err = Lam::new(
            Vector::zeros(1).unwrap(),
            CountingOracle::new(1, |_: &[f64]| f64::NAN),
            SolverConfig::default(),
        )
        .err()
        .unwrap();
        assert_eq!(err, Error::NonFiniteStart);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let err = solve(
            Vector::zeros(3).unwrap(),
            CountingOracle::new(2, sphere),
            &SolverConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }
}
