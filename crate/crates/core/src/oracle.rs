//! Black-box objective wrapper with exact evaluation accounting.

use crate::error::{Error, Result};

/// Wraps an objective `f: R^n -> R` and counts every underlying call.
///
/// The value of the current incumbent (the point the solver is searching
/// from) is cached, so asking for it again costs nothing. Non-finite
/// objective values are counted but reported as `None`.
pub struct CountingOracle<F> {
    objective: F,
    dim: usize,
    evals: u64,
    non_finite: u64,
    incumbent: Option<(Vec<f64>, f64)>,
}

impl<F> CountingOracle<F>
where
    F: Fn(&[f64]) -> f64,
{
    pub fn new(dim: usize, objective: F) -> Self {
        Self {
            objective,
            dim,
            evals: 0,
            non_finite: 0,
            incumbent: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of underlying objective calls so far.
    pub fn eval_count(&self) -> u64 {
        self.evals
    }

    /// How many of those calls produced NaN or an infinity.
    pub fn non_finite_count(&self) -> u64 {
        self.non_finite
    }

    /// `f(x)`, or `None` when the objective is not finite at `x`.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<Option<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.sample(x))
    }

    /// Record `value` as the known objective value at `x`.
    pub fn set_incumbent(&mut self, x: &[f64], value: f64) {
        debug_assert_eq!(x.len(), self.dim);
        self.incumbent = Some((x.to_vec(), value));
    }

    pub fn incumbent(&self) -> Option<(&[f64], f64)> {
        self.incumbent.as_ref().map(|(x, v)| (x.as_slice(), *v))
    }

    pub(crate) fn sample(&mut self, x: &[f64]) -> Option<f64> {
        if let Some((cached, value)) = &self.incumbent {
            if cached.as_slice() == x {
                return Some(*value);
            }
        }
        self.evals += 1;
        let value = (self.objective)(x);
        if value.is_finite() {
            Some(value)
        } else {
            self.non_finite += 1;
            None
        }
    }
}

impl<F> std::fmt::Debug for CountingOracle<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CountingOracle")
            .field("dim", &self.dim)
            .field("evals", &self.evals)
            .field("non_finite", &self.non_finite)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_of_squares(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn counts_and_caches() {
        let mut oracle = CountingOracle::new(2, sum_of_squares);
        assert_eq!(oracle.evaluate(&[0.0, 0.0]).unwrap(), Some(0.0));
        assert_eq!(oracle.eval_count(), 1);

        oracle.set_incumbent(&[0.0, 0.0], 0.0);
        assert_eq!(oracle.evaluate(&[0.0, 0.0]).unwrap(), Some(0.0));
        assert_eq!(oracle.eval_count(), 1);

        assert_eq!(oracle.evaluate(&[1.0, 0.0]).unwrap(), Some(1.0));
        assert_eq!(oracle.eval_count(), 2);
    }

    #[test]
    fn non_finite_is_a_failure_marker() {
        let mut oracle = CountingOracle::new(1, |_: &[f64]| f64::NAN);
        assert_eq!(oracle.evaluate(&[0.5]).unwrap(), None);
        assert_eq!(oracle.eval_count(), 1);
        assert_eq!(oracle.non_finite_count(), 1);

        let mut oracle = CountingOracle::new(1, |_: &[f64]| f64::NEG_INFINITY);
        assert_eq!(oracle.evaluate(&[0.5]).unwrap(), None);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let mut oracle = CountingOracle::new(2, sum_of_squares);
        assert_eq!(
            oracle.evaluate(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        );
        assert_eq!(oracle.eval_count(), 0);
    }
}
