use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use qimf_core::hamiltonian::preprocess_dominant;
use qimf_core::solver::{solve, Readout};
use qimf_core::{Algorithm, EstimatorMode, IsingHamiltonian, QuboInstance, RunTrace, SolverConfig};
use serde::Serialize;

use crate::common::{is_maxcut, load_problem, resolve_shots, trace_csv, write_file, ShotChoice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReadoutArg {
    /// Best exactly scored assignment seen.
    Best,
    /// Best of a fresh batch drawn from the final model.
    Sample,
}

/// Solver flags shared by `solve` and `bench`.
#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Samples per epoch (record interval for the baselines).
    #[arg(long = "nb", default_value_t = 40)]
    pub n_b: usize,
    /// Shots per cost estimate: an integer, `auto-simple`, `auto-block` or `all`.
    #[arg(long = "ns", default_value = "auto-simple")]
    pub n_s: ShotChoice,
    /// Estimator: `paper-literal` or `unbiased`.
    #[arg(long, default_value = "paper-literal")]
    pub mode: EstimatorMode,
    #[arg(long = "lr", default_value_t = 0.01)]
    pub learning_rate: f64,
    /// Fix diagonally dominant variables before solving.
    #[arg(long)]
    pub preprocess: bool,
    /// Exact-cost checkpoint interval in epochs.
    #[arg(long, default_value_t = 10)]
    pub checkpoint_every: usize,
    #[arg(long, value_enum, default_value_t = ReadoutArg::Best)]
    pub readout: ReadoutArg,
    /// Subtract the batch mean cost in the gradient.
    #[arg(long)]
    pub baseline: bool,
    /// Std of Gaussian noise on the initial logits.
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
}

impl SolverArgs {
    /// Config plus the resolved shot count for `h`.
    pub fn config(
        &self,
        algorithm: Algorithm,
        inst: &QuboInstance,
        h: &IsingHamiltonian,
    ) -> Result<(SolverConfig, usize)> {
        let target_terms = if self.preprocess {
            preprocess_dominant(h)?.hamiltonian.num_terms()
        } else {
            h.num_terms()
        };
        let n_s = resolve_shots(self.n_s, inst, target_terms)?;
        let mut cfg = SolverConfig::new(algorithm);
        cfg.n_b = self.n_b;
        cfg.n_s = n_s;
        cfg.estimator_mode = self.mode;
        cfg.adam.learning_rate = self.learning_rate;
        cfg.preprocess = self.preprocess;
        cfg.checkpoint_every = self.checkpoint_every;
        cfg.baseline = self.baseline;
        cfg.init_jitter = self.jitter;
        cfg.readout = match self.readout {
            ReadoutArg::Best => Readout::BestScored,
            ReadoutArg::Sample => Readout::Sample,
        };
        Ok((cfg, n_s))
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "qimf")]
    algo: Algorithm,
    /// Epochs (mean-field solvers) or exact evaluations (baselines).
    #[arg(long = "ne", default_value_t = 1000)]
    n_e: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Per-epoch trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Run summary and assignments as JSON.
    #[arg(long)]
    result: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunSummary<'a> {
    algo: &'a str,
    seed: u64,
    mode: Option<String>,
    n_w: usize,
    n_s: usize,
    n_b: usize,
    n_e: usize,
    queries: u64,
    oracle_queries: u64,
    final_cost: f64,
    best_cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    cut: Option<f64>,
    final_assignment: String,
    best_assignment: String,
    fixed: Option<&'a qimf_core::FixedVars>,
}

pub fn run(a: SolveArgs) -> Result<()> {
    let (inst, h) = load_problem(&a.instance)?;
    let (mut cfg, n_s) = a.solver.config(a.algo, &inst, &h)?;
    cfg.n_e = a.n_e;
    cfg.seed = a.seed;
    let trace: RunTrace = solve(&h, &cfg).with_context(|| format!("{} failed", a.algo))?;
    log::info!("{} finished in {:.3} s", a.algo, trace.seconds);

    if let Some(path) = &a.trace {
        write_file(path, &trace_csv(&trace, n_s, cfg.n_b))?;
    }
    let cut = is_maxcut(&inst).then_some(-trace.best_cost);
    if let Some(path) = &a.result {
        let summary = RunSummary {
            algo: a.algo.name(),
            seed: a.seed,
            mode: trace.estimator_mode.map(|m| m.to_string()),
            n_w: h.num_terms(),
            n_s,
            n_b: cfg.n_b,
            n_e: cfg.n_e,
            queries: trace.ledger.total,
            oracle_queries: trace.ledger.oracle,
            final_cost: trace.final_cost,
            best_cost: trace.best_cost,
            cut,
            final_assignment: trace.final_assignment.to_string(),
            best_assignment: trace.best_assignment.to_string(),
            fixed: trace.fixed.as_ref(),
        };
        write_file(path, &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    }

    let mut line = format!(
        "algo={} seed={} n_w={} n_s={} n_b={} n_e={} queries={} final_cost={} best_cost={}",
        a.algo,
        a.seed,
        h.num_terms(),
        n_s,
        cfg.n_b,
        cfg.n_e,
        trace.ledger.total,
        trace.final_cost,
        trace.best_cost
    );
    if let Some(m) = trace.estimator_mode {
        line.push_str(&format!(" mode={m}"));
    }
    if let Some(c) = cut {
        line.push_str(&format!(" cut={c}"));
    }
    if let Some(f) = &trace.fixed {
        line.push_str(&format!(" fixed={}", f.len()));
    }
    println!("{line}");
    Ok(())
}
