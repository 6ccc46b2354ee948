//! Closed-form complexity constants and per-iteration checkers.
//!
//! Everything here is a pure function of a [`TheoryContext`]. The checkers
//! need the gradient-Lipschitz constant `L` and a lower bound `f_min`, so
//! they are only usable on problems where those are known.

use serde::{Deserialize, Serialize};

use crate::config::{LinesearchVariant, SolverConfig};
use crate::error::{check_open_unit, check_positive, Error, Result};

/// Relative slack on the gradient bound.
pub const GRADIENT_BOUND_RELATIVE_SLACK: f64 = 1e-9;
/// Absolute slack on the merit-function decrease.
pub const PHI_DECREASE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryContext {
    pub n: usize,
    pub lipschitz: f64,
    pub gamma: f64,
    pub c: f64,
    pub theta: f64,
    pub delta: f64,
    pub f_min: f64,
    /// Merit value at the starting point.
    pub phi0: f64,
}

impl TheoryContext {
    /// Context for a run of `config` from a point where `f(x0) = f_x0`; the
    /// initial memory is uniform `config.alpha0`.
    pub fn new(n: usize, lipschitz: f64, config: &SolverConfig, f_min: f64, f_x0: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyVector);
        }
        check_positive("lipschitz", lipschitz)?;
        check_positive("gamma", config.gamma)?;
        check_open_unit("c", config.c)?;
        check_open_unit("theta", config.theta)?;
        check_open_unit("delta", config.delta)?;
        if f_min.is_nan() || f_x0.is_nan() || f_min > f_x0 {
            return Err(Error::InvalidParameter {
                name: "f_min",
                value: f_min,
                reason: "must not exceed f(x0)",
            });
        }
        Ok(Self {
            n,
            lipschitz,
            gamma: config.gamma,
            c: config.c,
            theta: config.theta,
            delta: config.delta,
            f_min,
            phi0: lyapunov_phi(f_x0, config.alpha0, config.gamma, config.c),
        })
    }

    fn sqrt_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    /// `(gamma + L (sqrt(n) + 1)) / min(theta, delta)`, the success-iteration factor.
    fn success_factor(&self) -> f64 {
        (self.gamma + self.lipschitz * (self.sqrt_n() + 1.0)) / self.theta.min(self.delta)
    }

    /// `(gamma + L) / theta`, the failure-iteration factor.
    fn failure_factor(&self) -> f64 {
        (self.gamma + self.lipschitz) / self.theta
    }
}

pub fn c1_constant(ctx: &TheoryContext) -> f64 {
    ctx.success_factor().max(ctx.failure_factor())
}

pub fn c_tilde_constant(ctx: &TheoryContext) -> f64 {
    let c2 = ctx.c * ctx.c;
    (ctx.gamma * c2).min(ctx.gamma * (1.0 - c2 / 2.0))
}

/// Merit function `f + c^2 gamma max_tilde_alpha^2 / 2`.
pub fn lyapunov_phi(f_x: f64, max_tilde_alpha: f64, gamma: f64, c: f64) -> f64 {
    f_x + 0.5 * c * c * gamma * max_tilde_alpha * max_tilde_alpha
}

/// Upper bound on `||grad f(x_k)||` given the memory maximum after iteration k.
pub fn gradient_bound_rhs(ctx: &TheoryContext, max_tilde_alpha_next: f64, success: bool) -> f64 {
    let factor = if success {
        ctx.success_factor()
    } else {
        ctx.failure_factor()
    };
    ctx.sqrt_n() * factor * max_tilde_alpha_next
}

pub fn check_gradient_bound(ctx: &TheoryContext, grad: &[f64], max_tilde_alpha_next: f64, success: bool) -> bool {
    let norm = crate::types::norm2(grad);
    norm <= gradient_bound_rhs(ctx, max_tilde_alpha_next, success) * (1.0 + GRADIENT_BOUND_RELATIVE_SLACK)
}

/// Required merit decrease `Phi_k - Phi_{k-1}` (a nonpositive number) for an
/// iteration ending with memory maximum `max_tilde_alpha_k`.
pub fn phi_decrease_bound(ctx: &TheoryContext, max_tilde_alpha_k: f64, success: bool) -> f64 {
    let m2 = max_tilde_alpha_k * max_tilde_alpha_k;
    if success {
        -c_tilde_constant(ctx) * m2
    } else {
        let t2 = ctx.theta * ctx.theta;
        -0.5 * ctx.c * ctx.c * ctx.gamma * ((1.0 - t2) / t2) * m2
    }
}

pub fn check_phi_decrease(
    ctx: &TheoryContext,
    phi_k: f64,
    phi_prev: f64,
    max_tilde_alpha_k: f64,
    success: bool,
) -> bool {
    phi_k - phi_prev <= phi_decrease_bound(ctx, max_tilde_alpha_k, success) + PHI_DECREASE_SLACK
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange(epsilon))
    }
}

// f64 -> u64 casts saturate, which is the right behaviour for bounds.
fn ceil_count(value: f64) -> u64 {
    value.ceil() as u64
}

/// Worst-case number of iterations before `||grad f|| <= epsilon`.
pub fn iteration_bound(ctx: &TheoryContext, epsilon: f64) -> Result<u64> {
    check_epsilon(epsilon)?;
    Ok(ceil_count(iteration_bound_raw(ctx, epsilon)))
}

fn iteration_bound_raw(ctx: &TheoryContext, epsilon: f64) -> f64 {
    let c1 = c1_constant(ctx);
    ctx.n as f64 * c1 * c1 * (ctx.phi0 - ctx.f_min) / c_tilde_constant(ctx) / (epsilon * epsilon)
}

/// `max_{a >= 0} (a + 1) delta^(2a)`.
pub fn phi_star(delta: f64) -> f64 {
    let ln_delta = delta.ln();
    let a_star = (-2.0 * ln_delta - 1.0) / (2.0 * ln_delta);
    if a_star < 0.0 {
        return 1.0;
    }
    let peak = -1.0 / (2.0 * ln_delta) * delta.powf(-2.0 - 1.0 / ln_delta);
    peak.max(1.0)
}

/// Worst-case number of function evaluations before `||grad f|| <= epsilon`.
///
/// `objective_gap` stands in for `f(x0) - f(x_hit)`; `f(x0) - f_min` is a
/// valid computable choice.
pub fn feval_bound(ctx: &TheoryContext, epsilon: f64, variant: LinesearchVariant, objective_gap: f64) -> Result<u64> {
    check_epsilon(epsilon)?;
    if objective_gap.is_nan() || objective_gap < 0.0 {
        return Err(Error::InvalidParameter {
            name: "objective_gap",
            value: objective_gap,
            reason: "must be nonnegative",
        });
    }
    let n = ctx.n as f64;
    let iterations = iteration_bound(ctx, epsilon)?;
    let c1 = c1_constant(ctx);
    let c2 = ctx.c * ctx.c;
    let eps2 = epsilon * epsilon;
    let expansions = match variant {
        LinesearchVariant::Standard => phi_star(ctx.delta) * n * c1 * c1 * objective_gap / (c2 * ctx.gamma) / eps2,
        LinesearchVariant::New => {
            let ratio = ctx.delta * ctx.delta / ((1.0 - ctx.delta) * (1.0 - ctx.delta));
            n * c1 * c1 * objective_gap / (ctx.gamma * c2 * eps2) * ratio
        }
    };
    Ok((2 * ctx.n as u64)
        .saturating_mul(iterations)
        .saturating_add(ceil_count(expansions)))
}
