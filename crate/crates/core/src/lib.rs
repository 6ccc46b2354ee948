//! Derivative-free minimisation by coordinate linesearches with extrapolation.
//!
//! The solver cycles through the coordinate directions, probing each one in
//! both orientations with a sufficient-decrease test and, when a probe
//! succeeds, expanding the step by `1 / delta` for as long as the decrease
//! persists. Per-coordinate step memories shrink on failure and grow with
//! accepted expansions.
//!
//! Besides the solver ([`driver`], [`linesearch`]) the crate carries the
//! closed-form worst-case constants and runtime checkers in [`theory`], and a
//! small suite of smooth problems with known gradients in [`problems`].
//!
//! ```
//! use lam_core::{solve, CountingOracle, SolverConfig, Vector};
//!
//! let oracle = CountingOracle::new(2, |x: &[f64]| (x[0] - 1.0).powi(2) + x[1] * x[1]);
//! let result = solve(Vector::new(vec![3.0, 2.0]).unwrap(), oracle, &SolverConfig::default()).unwrap();
//! assert!(result.f_final < 1e-12);
//! ```

pub mod config;
pub mod driver;
pub mod error;
pub mod linesearch;
pub mod oracle;
pub mod problems;
pub mod theory;
pub mod types;

pub use config::{Driver, LinesearchVariant, SolverConfig, StoppingRule};
pub use driver::{iterate_chained, iterate_modified, solve, IterationRecord, Lam, LamState, SolveResult, SolveStatus};
pub use error::{Error, Result};
pub use linesearch::{df_linesearch, LinesearchResult};
pub use oracle::CountingOracle;
pub use problems::TestProblem;
pub use theory::TheoryContext;
pub use types::{Sign, StepMemory, Vector};
