//! Points in R^n, coordinate signs and the per-coordinate step memory.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};

/// A finite point in R^n with n >= 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteEntry { index, value });
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn filled(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        norm2(&self.0)
    }

    /// `self + step * e_i`, touching only coordinate `i`.
    pub fn shifted(&self, i: usize, step: f64) -> Vec<f64> {
        shifted(&self.0, i, step)
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(entries: Vec<f64>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `y + step * e_i` with every other coordinate copied verbatim.
pub fn shifted(y: &[f64], i: usize, step: f64) -> Vec<f64> {
    let mut trial = y.to_vec();
    trial[i] += step;
    trial
}

/// Orientation of a coordinate direction: `d = sign * e_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Per-coordinate tentative step sizes and the direction signs that persist
/// between iterations.
///
/// Every step is strictly positive; the solver only ever replaces an entry
/// with an accepted step or a contraction of a positive step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepMemory {
    tilde_alpha: Vec<f64>,
    sign: Vec<Sign>,
}

impl StepMemory {
    /// Uniform memory `alpha0` with all directions set to `+e_i`.
    pub fn uniform(n: usize, alpha0: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyVector);
        }
        check_positive("alpha0", alpha0)?;
        Ok(Self {
            tilde_alpha: vec![alpha0; n],
            sign: vec![Sign::Plus; n],
        })
    }

    pub fn from_parts(tilde_alpha: Vec<f64>, sign: Vec<Sign>) -> Result<Self> {
        if tilde_alpha.is_empty() {
            return Err(Error::EmptyVector);
        }
        if sign.len() != tilde_alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: tilde_alpha.len(),
                got: sign.len(),
            });
        }
        for &a in &tilde_alpha {
            check_positive("tilde_alpha", a)?;
        }
        Ok(Self { tilde_alpha, sign })
    }

    pub fn dim(&self) -> usize {
        self.tilde_alpha.len()
    }

    pub fn step(&self, i: usize) -> f64 {
        self.tilde_alpha[i]
    }

    pub fn sign(&self, i: usize) -> Sign {
        self.sign[i]
    }

    pub fn steps(&self) -> &[f64] {
        &self.tilde_alpha
    }

    pub fn signs(&self) -> &[Sign] {
        &self.sign
    }

    /// Largest tentative step, `max_i tilde_alpha[i]`.
    pub fn max(&self) -> f64 {
        self.tilde_alpha.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_uniform(&self) -> bool {
        self.tilde_alpha.iter().all(|&a| a == self.tilde_alpha[0])
    }

    pub(crate) fn set(&mut self, i: usize, step: f64, sign: Sign) {
        debug_assert!(step > 0.0, "step memory must stay positive");
        self.tilde_alpha[i] = step;
        self.sign[i] = sign;
    }
}
