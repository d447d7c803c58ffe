//! Optimization loops and the query ledger.
//!
//! Cost is accounted in *queries*: one query is the evaluation of one
//! Hamiltonian term on one bitstring. A shot-subsampled estimate costs
//! `n_s` queries, an exact evaluation costs `n_w`. Hence
//!
//! * QIMF charges `n_s·n_b` per epoch, `n_s·n_b·n_e` in total;
//! * QUAMF charges `n_w·n_b` per epoch, `n_w·n_b·n_e` in total;
//! * the classical baselines charge `n_w` per exact evaluation.
//!
//! Exact evaluations made only to track the best solution (checkpoints)
//! are kept in a separate oracle counter and never enter the comparison.

mod baselines;
mod brute;
mod meanfield_loop;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::EstimatorMode;
use crate::hamiltonian::{preprocess_dominant, Assignment, IsingHamiltonian};
use crate::meanfield::AdamConfig;

pub use baselines::{greedy_local_search, one_plus_one, simulated_annealing};
pub use brute::{brute_force, BRUTE_FORCE_LIMIT};
pub use meanfield_loop::{solve_qimf, solve_quamf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Qimf,
    Quamf,
    Sa,
    Greedy,
    OnePlusOne,
    BruteForce,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Qimf,
        Algorithm::Quamf,
        Algorithm::Sa,
        Algorithm::Greedy,
        Algorithm::OnePlusOne,
        Algorithm::BruteForce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Qimf => "qimf",
            Algorithm::Quamf => "quamf",
            Algorithm::Sa => "sa",
            Algorithm::Greedy => "greedy",
            Algorithm::OnePlusOne => "oneplusone",
            Algorithm::BruteForce => "brute",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qimf" => Ok(Algorithm::Qimf),
            "quamf" => Ok(Algorithm::Quamf),
            "sa" | "annealing" => Ok(Algorithm::Sa),
            "greedy" => Ok(Algorithm::Greedy),
            "oneplusone" | "1+1" => Ok(Algorithm::OnePlusOne),
            "brute" | "bruteforce" | "brute-force" => Ok(Algorithm::BruteForce),
            _ => Err(Error::InvalidArgument(format!("unknown algorithm {s:?}"))),
        }
    }
}

/// How the final answer is read out of a trained mean-field model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Readout {
    /// Best exactly-scored assignment seen at any checkpoint.
    #[default]
    BestScored,
    /// Best of `n_b` fresh samples from the final model.
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Samples per epoch. Baselines use it as the record interval.
    pub n_b: usize,
    /// Shots per cost estimate (QIMF only).
    pub n_s: usize,
    /// Epochs for the mean-field solvers; exact evaluations for the baselines.
    pub n_e: usize,
    pub estimator_mode: EstimatorMode,
    pub adam: AdamConfig,
    pub seed: u64,
    pub preprocess: bool,
    /// Exact-cost checkpoint interval for the mean-field solvers.
    pub checkpoint_every: usize,
    /// Subtract the batch mean cost in the gradient.
    pub baseline: bool,
    /// Std of Gaussian noise added to the initial logits (0 = uniform start).
    pub init_jitter: f64,
    pub readout: Readout,
    /// Simulated annealing start temperature; `None` estimates it.
    pub sa_initial_temperature: Option<f64>,
    /// Ratio of final to initial annealing temperature.
    pub sa_final_ratio: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            algorithm: Algorithm::Qimf,
            n_b: 40,
            n_s: 1,
            n_e: 1000,
            estimator_mode: EstimatorMode::PaperLiteral,
            adam: AdamConfig::default(),
            seed: 0,
            preprocess: false,
            checkpoint_every: 10,
            baseline: false,
            init_jitter: 0.0,
            readout: Readout::BestScored,
            sa_initial_temperature: None,
            sa_final_ratio: 1e-3,
        }
    }
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        SolverConfig {
            algorithm,
            ..Default::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.n_b == 0 {
            return Err(Error::InvalidArgument("n_b must be at least 1".into()));
        }
        if self.n_e == 0 {
            return Err(Error::InvalidArgument("n_e must be at least 1".into()));
        }
        if self.algorithm == Algorithm::Qimf && self.n_s == 0 {
            return Err(Error::InvalidArgument("n_s must be at least 1".into()));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::InvalidArgument(
                "checkpoint interval must be at least 1".into(),
            ));
        }
        if !(self.sa_final_ratio > 0.0 && self.sa_final_ratio <= 1.0) {
            return Err(Error::InvalidArgument(
                "annealing ratio must be in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct QueryLedger {
    pub queries_per_epoch: u64,
    /// Queries charged to the optimization itself.
    pub total: u64,
    /// Exact evaluations for best-so-far tracking, in queries.
    pub oracle: u64,
}

impl QueryLedger {
    pub fn new(queries_per_epoch: u64) -> Self {
        QueryLedger {
            queries_per_epoch,
            total: 0,
            oracle: 0,
        }
    }

    pub fn charge(&mut self, queries: u64) {
        self.total += queries;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    /// Cumulative training queries after this epoch.
    pub queries: u64,
    /// Mean of the costs the algorithm saw this epoch (estimates for QIMF).
    pub mean_cost: f64,
    /// Best exact cost so far.
    pub best_cost: f64,
    pub best_assignment: Assignment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    /// Set for QIMF.
    pub estimator_mode: Option<EstimatorMode>,
    pub seed: u64,
    pub n_w: usize,
    pub n_s: usize,
    pub n_b: usize,
    pub records: Vec<EpochRecord>,
    pub ledger: QueryLedger,
    pub best_assignment: Assignment,
    pub best_cost: f64,
    pub final_assignment: Assignment,
    pub final_cost: f64,
    /// Variables fixed by preprocessing, if it ran.
    pub fixed: Option<crate::hamiltonian::FixedVars>,
    pub seconds: f64,
}

impl RunTrace {
    /// First cumulative query count at which the best cost is `<= target`.
    pub fn queries_to_reach(&self, target: f64) -> Option<u64> {
        self.records
            .iter()
            .find(|r| r.best_cost <= target)
            .map(|r| r.queries)
    }

    pub fn mean_costs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.mean_cost).collect()
    }
}

/// Best-so-far tracker. Ties keep the earlier assignment.
#[derive(Debug, Clone)]
pub(crate) struct Best {
    pub cost: f64,
    pub assignment: Assignment,
}

impl Best {
    pub fn new(n: usize) -> Self {
        Best {
            cost: f64::INFINITY,
            assignment: Assignment::zeros(n),
        }
    }

    pub fn offer(&mut self, cost: f64, x: &[u8]) {
        if cost < self.cost {
            self.cost = cost;
            self.assignment.0.clear();
            self.assignment.0.extend_from_slice(x);
        }
    }
}

pub(crate) fn check_finite(cost: f64, what: &str) -> Result<f64> {
    if cost.is_finite() {
        Ok(cost)
    } else {
        Err(Error::NonFinite(format!("{what} produced cost {cost}")))
    }
}

/// Runs `cfg.algorithm` on `h`, with optional diagonal-dominance preprocessing.
pub fn solve(h: &IsingHamiltonian, cfg: &SolverConfig) -> Result<RunTrace> {
    cfg.check()?;
    if !h.is_all_z() {
        return Err(Error::UnsupportedTerm(
            "solvers need an all-Z hamiltonian".into(),
        ));
    }
    let start = Instant::now();
    let mut trace = if cfg.preprocess {
        let pre = preprocess_dominant(h)?;
        let mut trace = dispatch(&pre.hamiltonian, cfg)?;
        for r in &mut trace.records {
            r.best_assignment = pre.lift(&r.best_assignment);
        }
        trace.best_assignment = pre.lift(&trace.best_assignment);
        trace.final_assignment = pre.lift(&trace.final_assignment);
        trace.best_cost = h.energy(&trace.best_assignment);
        trace.final_cost = h.energy(&trace.final_assignment);
        trace.fixed = Some(pre.fixed);
        trace
    } else {
        dispatch(h, cfg)?
    };
    trace.seconds = start.elapsed().as_secs_f64();
    Ok(trace)
}

fn dispatch(h: &IsingHamiltonian, cfg: &SolverConfig) -> Result<RunTrace> {
    match cfg.algorithm {
        Algorithm::Qimf => solve_qimf(h, cfg),
        Algorithm::Quamf => solve_quamf(h, cfg),
        Algorithm::Sa => simulated_annealing(h, cfg),
        Algorithm::Greedy => greedy_local_search(h, cfg),
        Algorithm::OnePlusOne => one_plus_one(h, cfg),
        Algorithm::BruteForce => brute::brute_force_trace(h, cfg),
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::hamiltonian::{qubo_to_ising, IsingHamiltonian};
    use crate::instance::QuboInstance;
    use crate::rng;
    use rand::Rng;

    /// Random dense QUBO with `N(0, 1)`-ish entries, mapped to Ising.
    pub fn random_hamiltonian(n: usize, seed: u64) -> IsingHamiltonian {
        let mut r = rng::stream(seed, "test/random-h");
        let mut inst = QuboInstance::new(n);
        for i in 0..n {
            for j in i..n {
                if i == j || r.random::<f64>() < 0.6 {
                    inst.set(i, j, r.random_range(-1.0..1.0));
                }
            }
        }
        qubo_to_ising(&inst, None, 1.0).unwrap()
    }

    pub fn diag(values: &[f64]) -> IsingHamiltonian {
        let mut inst = QuboInstance::new(values.len());
        for (i, &v) in values.iter().enumerate() {
            inst.set(i, i, v);
        }
        qubo_to_ising(&inst, None, 1.0).unwrap()
    }
}
