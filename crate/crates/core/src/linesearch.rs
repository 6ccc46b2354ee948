//! Derivative-free coordinate linesearch.
//!
//! Both variants share the same probe: try `y + abar d`, then `y - abar d`,
//! accepting the first point with `f <= f(y) - gamma abar^2`. An accepted
//! probe is followed by an extrapolation that keeps dividing the step by
//! `delta` while a sufficient-decrease test holds:
//!
//! * [`LinesearchVariant::Standard`] compares every expanded point with the
//!   start point: `f(y + a/delta d) <= f(y) - gamma (a/delta)^2`.
//! * [`LinesearchVariant::New`] compares consecutive points:
//!   `f(y + a/delta d) <= f(y + a d) - gamma ((1/delta - 1) a)^2`.
//!
//! All comparisons are non-strict with no tolerance. A non-finite objective
//! value never satisfies a test.

use serde::{Deserialize, Serialize};

use crate::config::{LinesearchVariant, SolverConfig};
use crate::error::{Error, Result};
use crate::oracle::CountingOracle;
use crate::types::{shifted, Sign};

/// Outcome of the two-sided probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probe {
    Accepted { sign: Sign, f_trial: f64, evals: u32 },
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinesearchResult {
    /// Accepted step, zero on failure.
    pub alpha: f64,
    pub sign_out: Sign,
    /// Number of accepted expansions.
    pub expansions: u32,
    pub evals_used: u32,
    /// Objective at `y + alpha * sign_out * e_i` (equals `f(y)` on failure).
    pub f_end: f64,
    /// Extrapolation stopped because the next step would exceed `max_step`.
    pub safety_stopped: bool,
}

impl LinesearchResult {
    pub fn is_success(&self) -> bool {
        self.alpha > 0.0
    }
}

fn check_args(dim: usize, y: &[f64], i: usize) -> Result<()> {
    if y.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: y.len(),
        });
    }
    if i >= dim {
        return Err(Error::CoordinateOutOfRange { index: i, dim });
    }
    Ok(())
}

/// Steps 1-4: two-sided probe of coordinate `i` at step `abar`.
pub fn probe<F>(
    oracle: &mut CountingOracle<F>,
    y: &[f64],
    f_y: f64,
    i: usize,
    sign_in: Sign,
    abar: f64,
    gamma: f64,
) -> Result<Probe>
where
    F: Fn(&[f64]) -> f64,
{
    check_args(oracle.dim(), y, i)?;
    let threshold = f_y - gamma * abar * abar;
    for (evals, sign) in (1..).zip([sign_in, sign_in.flipped()]) {
        if let Some(f_trial) = oracle.sample(&shifted(y, i, abar * sign.value())) {
            if f_trial <= threshold {
                return Ok(Probe::Accepted { sign, f_trial, evals });
            }
        }
    }
    Ok(Probe::Failed)
}

/// Extrapolation phase of the standard linesearch. `f_trial` is `f(y + abar * sign * e_i)`.
///
/// `evals_used` counts only the loop evaluations.
#[allow(clippy::too_many_arguments)]
pub fn extrapolate_standard<F>(
    oracle: &mut CountingOracle<F>,
    y: &[f64],
    f_y: f64,
    i: usize,
    sign: Sign,
    abar: f64,
    f_trial: f64,
    gamma: f64,
    delta: f64,
    max_step: f64,
) -> Result<LinesearchResult>
where
    F: Fn(&[f64]) -> f64,
{
    check_args(oracle.dim(), y, i)?;
    Ok(extrapolate(
        oracle,
        LinesearchVariant::Standard,
        y,
        f_y,
        i,
        sign,
        abar,
        f_trial,
        gamma,
        delta,
        max_step,
    ))
}

/// Extrapolation phase of the new linesearch. `f_trial` is `f(y + abar * sign * e_i)`.
///
/// `evals_used` counts only the loop evaluations.
#[allow(clippy::too_many_arguments)]
pub fn extrapolate_new<F>(
    oracle: &mut CountingOracle<F>,
    y: &[f64],
    f_y: f64,
    i: usize,
    sign: Sign,
    abar: f64,
    f_trial: f64,
    gamma: f64,
    delta: f64,
    max_step: f64,
) -> Result<LinesearchResult>
where
    F: Fn(&[f64]) -> f64,
{
    check_args(oracle.dim(), y, i)?;
    Ok(extrapolate(
        oracle,
        LinesearchVariant::New,
        y,
        f_y,
        i,
        sign,
        abar,
        f_trial,
        gamma,
        delta,
        max_step,
    ))
}

#[allow(clippy::too_many_arguments)]
fn extrapolate<F>(
    oracle: &mut CountingOracle<F>,
    variant: LinesearchVariant,
    y: &[f64],
    f_y: f64,
    i: usize,
    sign: Sign,
    abar: f64,
    f_trial: f64,
    gamma: f64,
    delta: f64,
    max_step: f64,
) -> LinesearchResult
where
    F: Fn(&[f64]) -> f64,
{
    let mut alpha = abar;
    let mut f_last = f_trial;
    let mut expansions = 0;
    let mut evals = 0;
    let mut safety_stopped = false;
    loop {
        let next = alpha / delta;
        if next > max_step {
            safety_stopped = true;
            break;
        }
        let threshold = match variant {
            LinesearchVariant::Standard => f_y - gamma * next * next,
            LinesearchVariant::New => {
                let gap = (1.0 / delta - 1.0) * alpha;
                f_last - gamma * gap * gap
            }
        };
        evals += 1;
        match oracle.sample(&shifted(y, i, next * sign.value())) {
            Some(value) if value <= threshold => {
                alpha = next;
                f_last = value;
                expansions += 1;
            }
            _ => break,
        }
    }
    LinesearchResult {
        alpha,
        sign_out: sign,
        expansions,
        evals_used: evals,
        f_end: f_last,
        safety_stopped,
    }
}

/// Full linesearch along `sign_in * e_i` from `y`, whose value `f_y` is known.
#[allow(clippy::too_many_arguments)]
pub fn df_linesearch<F>(
    variant: LinesearchVariant,
    oracle: &mut CountingOracle<F>,
    y: &[f64],
    f_y: f64,
    i: usize,
    sign_in: Sign,
    abar: f64,
    config: &SolverConfig,
) -> Result<LinesearchResult>
where
    F: Fn(&[f64]) -> f64,
{
    match probe(oracle, y, f_y, i, sign_in, abar, config.gamma)? {
        Probe::Failed => Ok(LinesearchResult {
            alpha: 0.0,
            sign_out: sign_in,
            expansions: 0,
            evals_used: 2,
            f_end: f_y,
            safety_stopped: false,
        }),
        Probe::Accepted { sign, f_trial, evals } => {
            let mut result = extrapolate(
                oracle,
                variant,
                y,
                f_y,
                i,
                sign,
                abar,
                f_trial,
                config.gamma,
                config.delta,
                config.stop.max_step,
            );
            result.evals_used += evals;
            Ok(result)
        }
    }
}
