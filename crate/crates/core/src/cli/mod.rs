//! The `imc` command line: `validate`, `infer` and `check`.
//!
//! Exit codes: 0 success, 1 oracle disagreement in `check`, 2 parse or
//! validation error, 3 numerical failure, 4 size cap exceeded.

pub mod format;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::credal::ImpreciseMarkovChain;
use crate::error::Error;
use crate::inference::{limit_infer_with, DEFAULT_LIMIT_TOL, DEFAULT_MAX_HORIZON};
use crate::oracle::{materialize_tau, naive_conditional_bounds_with};
use crate::recursion::{conditional_bounds_with, infer_with, unconditional_bounds};
use crate::transition::Transitions;

use format::{
    conditional_map, to_document_string, BoundsDocument, CheckDocument, InferDocument, ModelFile, Plan, QueryFile,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_CAP: i32 = 4;

/// Largest conditional discrepancy `check` accepts.
pub const CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "imc", version, about = "Lower and upper expectations for imprecise Markov chains")]
pub struct Cli {
    /// Worker threads for per-state LP evaluation (1 = sequential).
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model file against every invariant.
    Validate { model: PathBuf },
    /// Compute lower and upper expectations for a query.
    Infer {
        model: PathBuf,
        query: PathBuf,
        /// Convergence tolerance for limit queries without their own `tol`.
        #[arg(long, default_value_t = DEFAULT_LIMIT_TOL)]
        tol: f64,
        /// Horizon cap for limit queries without their own `max_horizon`.
        #[arg(long, default_value_t = DEFAULT_MAX_HORIZON)]
        max_horizon: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare the recursion with full backward induction over all histories.
    Check {
        model: PathBuf,
        query: PathBuf,
        /// Largest number of entries of the tabulated query function.
        #[arg(long, default_value_t = 1e7)]
        oracle_cap: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the result document here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INVALID, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } => EXIT_CAP,
            Error::Infeasible | Error::Unbounded | Error::NonFinite { .. } => EXIT_NUMERICAL,
            _ => EXIT_INVALID,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
        }
    };
    if cli.threads > 1 {
        // Fails harmlessly if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let parallel = cli.threads > 1;
    let result = match &cli.command {
        Command::Validate { model } => validate(model, stdout),
        Command::Infer { model, query, tol, max_horizon, output } => {
            infer(model, query, *tol, *max_horizon, parallel).and_then(|doc| emit(&doc, output, stdout))
        }
        Command::Check { model, query, oracle_cap, output } => check(model, query, *oracle_cap, parallel)
            .and_then(|doc| {
                let passed = doc.passed;
                emit(&doc, output, stdout)?;
                Ok(passed)
            })
            .and_then(|passed| {
                if passed {
                    Ok(())
                } else {
                    Err(Failure {
                        code: EXIT_CHECK_FAILED,
                        message: format!("engine and oracle differ by more than {CHECK_TOL:e}"),
                    })
                }
            }),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<ImpreciseMarkovChain, Failure> {
    let file: ModelFile = serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::invalid(format!("{}: malformed model document: {e}", path.display())))?;
    file.to_model().map_err(|problems| {
        Failure::invalid(format!(
            "{}: invalid model:\n  {}",
            path.display(),
            problems.join("\n  ")
        ))
    })
}

fn load_plan(path: &Path, model: &ImpreciseMarkovChain) -> Result<Plan, Failure> {
    let file: QueryFile = serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::invalid(format!("{}: malformed query document: {e}", path.display())))?;
    file.plan(model.states())
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn emit<T: serde::Serialize>(doc: &T, output: &OutputArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = to_document_string(doc);
    match &output.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::invalid(format!("cannot write output: {e}"))),
    }
}

fn validate(path: &Path, stdout: &mut dyn Write) -> Result<(), Failure> {
    let model = load_model(path)?;
    let _ = writeln!(stdout, "{}: valid model with {} states", path.display(), model.dim());
    Ok(())
}

fn infer(
    model_path: &Path,
    query_path: &Path,
    tol: f64,
    max_horizon: usize,
    parallel: bool,
) -> Result<InferDocument, Failure> {
    let model = load_model(model_path)?;
    let plan = load_plan(query_path, &model)?;
    let ops = Transitions::new(&model).parallel(parallel);
    let states = model.states();
    match plan {
        Plan::Finite { spec, scale } => {
            let r = infer_with(&ops, &spec)?.scaled(scale);
            Ok(InferDocument {
                upper: r.upper,
                lower: r.lower,
                conditional: conditional_map(states, &r.upper_conditional, &r.lower_conditional),
                lp_calls: r.lp_calls,
                horizon: Some(spec.horizon()),
                horizon_reached: None,
                converged: None,
                upper_trace: None,
                lower_trace: None,
            })
        }
        Plan::Limit { family, limit } => {
            let r = limit_infer_with(
                &ops,
                &family,
                limit.tol.unwrap_or(tol),
                limit.max_horizon.unwrap_or(max_horizon),
            )?;
            Ok(InferDocument {
                upper: r.upper,
                lower: r.lower,
                conditional: conditional_map(states, &r.upper_conditional, &r.lower_conditional),
                lp_calls: r.lp_calls,
                horizon: None,
                horizon_reached: Some(r.horizon_reached),
                converged: Some(r.converged),
                upper_trace: Some(r.upper_trace),
                lower_trace: Some(r.lower_trace),
            })
        }
    }
}

fn check(model_path: &Path, query_path: &Path, oracle_cap: f64, parallel: bool) -> Result<CheckDocument, Failure> {
    let model = load_model(model_path)?;
    let (spec, scale) = match load_plan(query_path, &model)? {
        Plan::Finite { spec, scale } => (spec, scale),
        Plan::Limit { .. } => {
            return Err(Failure::invalid(format!(
                "{}: check needs a finite horizon, not a limit query",
                query_path.display()
            )))
        }
    };
    if !(oracle_cap >= 1.0) {
        return Err(Failure::invalid("--oracle-cap must be at least 1"));
    }
    let cap = oracle_cap.min(usize::MAX as f64) as usize;

    let engine_ops = Transitions::new(&model).parallel(parallel);
    let (eu, el) = conditional_bounds_with(&engine_ops, &spec)?;
    let tau = materialize_tau(&spec, cap)?;
    let oracle_ops = Transitions::new(&model).parallel(parallel);
    let (ou, ol) = naive_conditional_bounds_with(&oracle_ops, &tau)?;

    let (eu, el, ou, ol) = (eu.scale(scale), el.scale(scale), ou.scale(scale), ol.scale(scale));
    let (e_upper, e_lower) = unconditional_bounds(&model, &eu, &el)?;
    let (o_upper, o_lower) = unconditional_bounds(&model, &ou, &ol)?;
    let max_discrepancy = eu
        .max_abs_diff(&ou)
        .max(el.max_abs_diff(&ol))
        .max((e_upper - o_upper).abs())
        .max((e_lower - o_lower).abs());

    let states = model.states();
    Ok(CheckDocument {
        horizon: spec.horizon(),
        engine: BoundsDocument { upper: e_upper, lower: e_lower, conditional: conditional_map(states, &eu, &el) },
        oracle: BoundsDocument { upper: o_upper, lower: o_lower, conditional: conditional_map(states, &ou, &ol) },
        max_discrepancy,
        engine_lp_calls: engine_ops.lp_calls(),
        oracle_lp_calls: oracle_ops.lp_calls(),
        passed: max_discrepancy < CHECK_TOL,
    })
}
