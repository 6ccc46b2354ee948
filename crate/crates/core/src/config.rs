use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, check_positive, Error, Result};

/// Which extrapolation rule the linesearch uses once a probe is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinesearchVariant {
    /// Every expansion is compared against the linesearch start point.
    Standard,
    /// Every expansion is compared against the previously accepted point.
    New,
}

/// How one outer iteration walks the coordinate directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Driver {
    /// Each coordinate search starts at the point produced by the previous one.
    Chained,
    /// Every coordinate search starts at the iterate; the best end point wins.
    Modified,
}

/// Termination criteria.
///
/// `None` budgets are inactive; `Some(0)` stops before the first iteration.
/// A `step_tolerance` of zero is inactive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StoppingRule {
    pub max_iterations: Option<u64>,
    pub max_evaluations: Option<u64>,
    pub step_tolerance: f64,
    /// Upper bound on an extrapolated step; larger steps are never tried.
    pub max_step: f64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            max_iterations: None,
            max_evaluations: Some(1_000_000),
            step_tolerance: 1e-8,
            max_step: 1e10,
        }
    }
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_tolerance >= 0.0 && self.step_tolerance.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "step_tolerance",
                value: self.step_tolerance,
                reason: "must be finite and nonnegative",
            });
        }
        check_positive("max_step", self.max_step)?;
        if self.max_iterations.is_none() && self.max_evaluations.is_none() && self.step_tolerance == 0.0 {
            return Err(Error::NoActiveStoppingRule);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Fraction of the largest memory step every tentative step must reach.
    pub c: f64,
    /// Contraction applied to a tentative step after a failed linesearch.
    pub theta: f64,
    /// Sufficient-decrease coefficient.
    pub gamma: f64,
    /// Extrapolation shrink factor; steps grow by `1 / delta`.
    pub delta: f64,
    pub variant: LinesearchVariant,
    pub driver: Driver,
    /// Initial tentative step for every coordinate.
    pub alpha0: f64,
    pub stop: StoppingRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            c: 0.5,
            theta: 0.5,
            gamma: 1e-6,
            delta: 0.5,
            variant: LinesearchVariant::Standard,
            driver: Driver::Chained,
            alpha0: 1.0,
            stop: StoppingRule::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        check_open_unit("c", self.c)?;
        check_open_unit("theta", self.theta)?;
        check_positive("gamma", self.gamma)?;
        check_open_unit("delta", self.delta)?;
        check_positive("alpha0", self.alpha0)?;
        self.stop.validate()
    }

    pub fn with_variant(mut self, variant: LinesearchVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_driver(mut self, driver: Driver) -> Self {
        self.driver = driver;
        self
    }

    pub fn with_stop(mut self, stop: StoppingRule) -> Self {
        self.stop = stop;
        self
    }
}
