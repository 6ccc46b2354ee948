use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lam_core::{Driver, LinesearchVariant, SolverConfig};
use lam_harness::sweep::DEFAULT_EPSILONS;
use lam_harness::{export_envelopes, run_solve, run_sweep, run_verify, EnvelopeSpec, HarnessError, VerifyOptions};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "lam",
    version,
    about = "Derivative-free coordinate linesearch solver and experiment harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a named problem and write trace.csv and summary.json.
    Solve {
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Measure hitting times for several epsilons against the theoretical bounds.
    Sweep {
        #[command(flatten)]
        solver: SolverArgs,
        /// Gradient-norm threshold in (0, 1); repeat for several.
        #[arg(long = "eps")]
        eps: Vec<f64>,
    },
    /// Check the convergence invariants at every iteration.
    Verify {
        #[command(flatten)]
        solver: SolverArgs,
        /// Use this theta in the checkers instead of the solver's.
        #[arg(long)]
        checker_theta: Option<f64>,
        /// Use this Lipschitz constant in the checkers instead of the problem's.
        #[arg(long)]
        checker_lipschitz: Option<f64>,
    },
    /// Tabulate both sufficient-decrease envelopes along a line.
    Envelope(EnvelopeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Standard,
    New,
}

#[derive(Clone, Copy, ValueEnum)]
enum DriverArg {
    Chained,
    Modified,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long)]
    problem: String,
    /// JSON solver configuration; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long, value_enum)]
    driver: Option<DriverArg>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    alpha0: Option<f64>,
    #[arg(long)]
    max_iters: Option<u64>,
    #[arg(long)]
    max_evals: Option<u64>,
    /// Stop once every remembered step is at most this; 0 disables the rule.
    #[arg(long)]
    step_tol: Option<f64>,
    /// Cap on a single extrapolated step.
    #[arg(long)]
    max_step: Option<f64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct EnvelopeArgs {
    #[arg(long)]
    problem: String,
    /// Base point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    x: Vec<f64>,
    /// Direction, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    dir: Vec<f64>,
    #[arg(long)]
    abar: f64,
    #[arg(long, default_value_t = SolverConfig::default().gamma)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha_min: f64,
    #[arg(long)]
    alpha_max: f64,
    #[arg(long)]
    alpha_step: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn load_config(path: &Path) -> Result<SolverConfig, HarnessError> {
    let config_err = |source: Box<dyn std::error::Error + Send + Sync>| HarnessError::Config {
        path: path.to_path_buf(),
        source,
    };
    let text = fs::read_to_string(path).map_err(|e| config_err(Box::new(e)))?;
    serde_json::from_str(&text).map_err(|e| config_err(Box::new(e)))
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => SolverConfig::default(),
        };
        if let Some(v) = self.variant {
            cfg.variant = match v {
                VariantArg::Standard => LinesearchVariant::Standard,
                VariantArg::New => LinesearchVariant::New,
            };
        }
        if let Some(d) = self.driver {
            cfg.driver = match d {
                DriverArg::Chained => Driver::Chained,
                DriverArg::Modified => Driver::Modified,
            };
        }
        let scalars = [
            (self.c, &mut cfg.c),
            (self.theta, &mut cfg.theta),
            (self.gamma, &mut cfg.gamma),
            (self.delta, &mut cfg.delta),
            (self.alpha0, &mut cfg.alpha0),
            (self.step_tol, &mut cfg.stop.step_tolerance),
            (self.max_step, &mut cfg.stop.max_step),
        ];
        for (flag, field) in scalars {
            if let Some(v) = flag {
                *field = v;
            }
        }
        if self.max_iters.is_some() {
            cfg.stop.max_iterations = self.max_iters;
        }
        if self.max_evals.is_some() {
            cfg.stop.max_evaluations = self.max_evals;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<u8, HarnessError> {
    match cli.command {
        Command::Solve { solver } => {
            let result = run_solve(&solver.problem, &solver.config()?, &solver.out)?;
            println!(
                "{:?} after {} iterations, {} evaluations, f = {:e}",
                result.status, result.iterations, result.evaluations, result.f_final
            );
            Ok(0)
        }
        Command::Sweep { solver, eps } => {
            let eps = if eps.is_empty() { DEFAULT_EPSILONS.to_vec() } else { eps };
            let result = run_sweep(&solver.problem, &solver.config()?, &eps, &solver.out)?;
            for row in &result.rows {
                let show = |v: Option<u64>| v.map_or("-".to_string(), |x| x.to_string());
                println!(
                    "eps {:e}: hit k = {} (bound {}), evals = {} (bound {})",
                    row.epsilon,
                    show(row.hitting_iteration),
                    row.iteration_bound,
                    show(row.hitting_evaluations),
                    row.feval_bound
                );
            }
            match result.slope_fit {
                Some(s) => println!("log-log slope {s:.3}"),
                None => println!("log-log slope: not enough points"),
            }
            Ok(if result.all_within_bounds() {
                0
            } else {
                EXIT_CHECK_FAILED
            })
        }
        Command::Verify {
            solver,
            checker_theta,
            checker_lipschitz,
        } => {
            let options = VerifyOptions {
                checker_theta,
                checker_lipschitz,
            };
            let report = run_verify(&solver.problem, &solver.config()?, &options, &solver.out)?;
            let t = &report.tallies;
            println!("{:?}: {}", report.status, report.reason.as_deref().unwrap_or(""));
            for (name, tally) in [
                ("gradient_bound", t.gradient_bound),
                ("phi_decrease", t.phi_decrease),
                ("memory_contraction", t.memory_contraction),
                ("failure_evals", t.failure_evals),
            ] {
                println!(
                    "  {name}: {} pass, {} fail, {} skipped, {} n/a",
                    tally.pass, tally.fail, tally.skip, tally.not_applicable
                );
            }
            Ok(report.status.exit_code() as u8)
        }
        Command::Envelope(args) => {
            let spec = EnvelopeSpec {
                problem: args.problem,
                x: args.x,
                dir: args.dir,
                abar: args.abar,
                gamma: args.gamma,
                alpha_min: args.alpha_min,
                alpha_max: args.alpha_max,
                alpha_step: args.alpha_step,
            };
            let rows = export_envelopes(&spec, &args.out)?;
            println!("{} rows written", rows.len());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
