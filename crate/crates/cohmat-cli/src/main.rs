//! Command-line front end: membership checks, threshold sweeps, model
//! curves and constructive-instrument demos, with deterministic CSV and
//! static SVG output.

mod commands;
mod gfmt;
mod io;
mod pool;
mod svg;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug)]
pub struct CliError {
    pub msg: String,
    pub code: i32,
}

impl CliError {
    pub fn input(msg: String) -> Self {
        Self { msg, code: 64 }
    }

    pub fn other(msg: String) -> Self {
        Self { msg, code: 70 }
    }
}

impl From<cohmat::CohError> for CliError {
    fn from(e: cohmat::CohError) -> Self {
        CliError::input(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "cohmat",
    about = "Coherence patterns vs. measurement incompatibility: checks, sweeps, witnesses",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Bisection tolerance for threshold searches.
    #[arg(long = "alpha-tol")]
    alpha_tol: Option<f64>,
    /// Iteration budget of the feasibility solver.
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Residual below which a witness counts as feasible.
    #[arg(long = "feas-tol")]
    feas_tol: Option<f64>,
    /// Stalled residual above which the instance counts as infeasible.
    #[arg(long = "infeas-threshold")]
    infeas_threshold: Option<f64>,
    /// JSON config file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(serde::Deserialize, Default)]
struct ConfigFile {
    #[serde(default)]
    solver: ConfigSolver,
    jobs: Option<usize>,
}

#[derive(serde::Deserialize, Default)]
struct ConfigSolver {
    max_iters: Option<usize>,
    feas_tol: Option<f64>,
    infeas_threshold: Option<f64>,
    stall_window: Option<usize>,
    bisect_tol: Option<f64>,
}

impl SolverArgs {
    /// Flags > config file > defaults.
    fn resolve(&self) -> Result<(cohmat::gii::SolverOptions, Option<usize>), CliError> {
        let mut opts = cohmat::gii::SolverOptions::default();
        let mut jobs = None;
        if let Some(path) = &self.config {
            let cfg: ConfigFile = io::read_json(path)?;
            if let Some(v) = cfg.solver.max_iters {
                opts.max_iters = v;
            }
            if let Some(v) = cfg.solver.feas_tol {
                opts.feas_tol = v;
            }
            if let Some(v) = cfg.solver.infeas_threshold {
                opts.infeas_threshold = v;
            }
            if let Some(v) = cfg.solver.stall_window {
                opts.stall_window = v;
            }
            if let Some(v) = cfg.solver.bisect_tol {
                opts.bisect_tol = v;
            }
            jobs = cfg.jobs;
        }
        if let Some(v) = self.max_iters {
            opts.max_iters = v;
        }
        if let Some(v) = self.feas_tol {
            opts.feas_tol = v;
        }
        if let Some(v) = self.infeas_threshold {
            opts.infeas_threshold = v;
        }
        if let Some(v) = self.alpha_tol {
            opts.bisect_tol = v;
        }
        if opts.feas_tol <= 0.0 || opts.infeas_threshold <= 0.0 || opts.bisect_tol <= 0.0 {
            return Err(CliError::input("tolerances must be positive".into()));
        }
        Ok((opts, jobs))
    }
}

/// `a:b:n` inclusive grid.
fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::input(format!(
            "grid `{spec}` is not of the form a:b:n"
        )));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::input(format!("bad grid start `{}`", parts[0])))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::input(format!("bad grid end `{}`", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| CliError::input(format!("bad grid count `{}`", parts[2])))?;
    if n < 2 {
        return Err(CliError::input("grid needs at least 2 points".into()));
    }
    Ok((0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect())
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether an incoherent observable is compatible with a
    /// coherence pattern (closed-form checks plus the feasibility solver).
    ///
    /// Exit codes: 0 member, 1 not member, 2 unknown, 64 bad input.
    Check {
        /// Coherence matrix JSON.
        #[arg(long)]
        coherence: PathBuf,
        /// Incoherent observable JSON.
        #[arg(long)]
        observable: PathBuf,
        /// Optional POVM JSON; runs the tradeoff witness and the Schur
        /// sufficient condition against the observable as well.
        #[arg(long)]
        povm: Option<PathBuf>,
        /// Write the witness JSON here when the verdict is feasible.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Threshold sweep for the uniform (noisy-MUB) pattern: CSV columns
    /// lambda, cor1_bound, cor2_bound, alpha_star, g_d, status.
    SweepMub {
        #[arg(long)]
        dim: usize,
        #[arg(long = "lambda-grid", default_value = "0.1:0.9:9")]
        lambda_grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Collective-decoherence curves: analytic bounds, the theta-series
    /// classicality line and (optionally) the solver threshold.
    Spinboson {
        #[arg(long)]
        n: usize,
        #[arg(long = "lambda-grid", default_value = "0.05:0.95:19")]
        lambda_grid: String,
        /// Also run the feasibility solver per grid point.
        #[arg(long = "with-sdp")]
        with_sdp: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Membership mesh of the 3-dimensional centrosymmetric family at
    /// gamma = lambda^4 (the two-qubit collective-decoherence region).
    RegionN2 {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 41)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Emit a constructive instrument and its verification report.
    GiiDemo {
        #[command(subcommand)]
        kind: DemoKind,
    },
}

#[derive(Subcommand)]
enum DemoKind {
    /// Uniform pattern at the corner lambda = alpha = -1/(d-1).
    Corner {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Qubit pattern with off-diagonal c against a binary diagonal
    /// observable; defaults to the boundary |c| = Hellinger affinity.
    Qubit {
        /// Outcome distribution of basis state 0, comma-separated.
        #[arg(long, value_delimiter = ',')]
        p: Vec<f64>,
        /// Outcome distribution of basis state 1, comma-separated.
        #[arg(long, value_delimiter = ',')]
        q: Vec<f64>,
        #[arg(long = "c-re")]
        c_re: Option<f64>,
        #[arg(long = "c-im")]
        c_im: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Banded construction for the N-qubit reduced problem at weight alpha.
    Appendixh {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap's help/version go to stdout with success
            if e.use_stderr() {
                eprintln!("{e}");
                std::process::exit(64);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    let result = match cli.command {
        Command::Check {
            coherence,
            observable,
            povm,
            out,
            solver,
        } => commands::check::run(&coherence, &observable, povm.as_deref(), out.as_deref(), &solver),
        Command::SweepMub {
            dim,
            lambda_grid,
            out,
            jobs,
            solver,
        } => commands::sweep_mub::run(dim, &lambda_grid, out.as_deref(), jobs, &solver),
        Command::Spinboson {
            n,
            lambda_grid,
            with_sdp,
            out,
            svg,
            jobs,
            solver,
        } => commands::spinboson::run(
            n,
            &lambda_grid,
            with_sdp,
            out.as_deref(),
            svg.as_deref(),
            jobs,
            &solver,
        ),
        Command::RegionN2 {
            lambda,
            resolution,
            out,
            svg,
        } => commands::region_n2::run(lambda, resolution, out.as_deref(), svg.as_deref()),
        Command::GiiDemo { kind } => commands::gii_demo::run(kind),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            std::process::exit(e.code);
        }
    }
}
