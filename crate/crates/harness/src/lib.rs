//! Experiment harness for the `lam-core` solver.
//!
//! Runs solves, epsilon sweeps and invariant checks on the named test
//! problems, and exports line envelopes. Results are flat files: CSV for
//! tabular data, JSON for summaries. The `lam` binary is a thin clap front
//! end over the functions here.

pub mod envelope;
pub mod error;
pub mod output;
pub mod runs;
pub mod sweep;
pub mod verify;

pub use envelope::{export_envelopes, EnvelopeRow, EnvelopeSpec};
pub use error::{HarnessError, Result};
pub use output::{trace_csv, SolveSummary, TRACE_HEADER};
pub use runs::{run_solve, solve_problem};
pub use sweep::{run_sweep, sweep_problem, SweepResult, SweepRow, DEFAULT_EPSILONS};
pub use verify::{run_verify, verify_problem, CheckOutcome, VerifyOptions, VerifyReport, VerifyStatus};
