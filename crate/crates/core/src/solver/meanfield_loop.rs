use crate::error::{Error, Result};
use crate::estimator::ShotAllocator;
use crate::hamiltonian::IsingHamiltonian;
use crate::meanfield::{adam_step, objective_and_grad, AdamState, MeanFieldModel};
use crate::rng;

use super::{
    check_finite, Algorithm, Best, EpochRecord, QueryLedger, Readout, RunTrace, SolverConfig,
};

/// Shared by both solvers so that equal costs give equal trajectories.
const BATCH_STREAM: &str = "meanfield/batch";
const INIT_STREAM: &str = "meanfield/init";
const READOUT_STREAM: &str = "meanfield/readout";
const SHOT_STREAM: &str = "qimf/shots";

enum Scorer<'h> {
    /// Exact evaluation of every term.
    Exact,
    /// Shot-subsampled estimate; `None` when the Hamiltonian has no terms.
    Shots(Option<ShotAllocator<'h>>),
}

/// Mean-field optimization with shot-subsampled costs.
///
/// Per epoch: draw `n_b` bitstrings from the model, estimate each cost
/// with `n_s` shots, take the score-function gradient of the batch mean
/// cost and apply one ADAM step.
pub fn solve_qimf(h: &IsingHamiltonian, cfg: &SolverConfig) -> Result<RunTrace> {
    cfg.check()?;
    let alloc = if h.num_terms() > 0 {
        let alloc = ShotAllocator::new(h)?;
        if cfg.estimator_mode == crate::EstimatorMode::PaperLiteral
            && cfg.n_s > alloc.support_size()
        {
            return Err(Error::TooManyShots {
                requested: cfg.n_s,
                available: alloc.support_size(),
            });
        }
        Some(alloc)
    } else {
        None
    };
    run(h, cfg, Algorithm::Qimf, Scorer::Shots(alloc))
}

/// The same loop scored with the exact cost; charges `n_w` per evaluation.
pub fn solve_quamf(h: &IsingHamiltonian, cfg: &SolverConfig) -> Result<RunTrace> {
    cfg.check()?;
    run(h, cfg, Algorithm::Quamf, Scorer::Exact)
}

fn run(
    h: &IsingHamiltonian,
    cfg: &SolverConfig,
    algorithm: Algorithm,
    scorer: Scorer<'_>,
) -> Result<RunTrace> {
    let n = h.num_qubits();
    let n_w = h.num_terms();
    let per_sample = match scorer {
        Scorer::Exact => n_w,
        Scorer::Shots(_) => cfg.n_s,
    } as u64;
    let mut ledger = QueryLedger::new(per_sample * cfg.n_b as u64);

    let mut model = if cfg.init_jitter > 0.0 {
        MeanFieldModel::jittered(n, cfg.init_jitter, &mut rng::stream(cfg.seed, INIT_STREAM))?
    } else {
        MeanFieldModel::uniform(n)
    };
    let mut adam = AdamState::new(n, cfg.adam);
    let mut batch_rng = rng::stream(cfg.seed, BATCH_STREAM);
    let mut shot_rng = rng::stream(cfg.seed, SHOT_STREAM);

    let mut best = Best::new(n);
    let mut records = Vec::with_capacity(cfg.n_e);
    let mut costs = Vec::with_capacity(cfg.n_b);

    for epoch in 1..=cfg.n_e {
        let batch = model.sample_batch(cfg.n_b, &mut batch_rng)?;
        costs.clear();
        for x in &batch.samples {
            let c = match &scorer {
                Scorer::Exact => h.energy(x),
                Scorer::Shots(Some(alloc)) => {
                    alloc.cost_s(x, cfg.n_s, cfg.estimator_mode, &mut shot_rng)?
                }
                Scorer::Shots(None) => h.offset,
            };
            costs.push(check_finite(c, algorithm.name())?);
        }
        ledger.charge(ledger.queries_per_epoch);

        if let Scorer::Exact = scorer {
            for (x, &c) in batch.samples.iter().zip(&costs) {
                best.offer(c, x);
            }
        }
        let checkpoint = epoch == 1 || epoch % cfg.checkpoint_every == 0 || epoch == cfg.n_e;
        if checkpoint {
            if let Scorer::Shots(_) = scorer {
                for x in &batch.samples {
                    best.offer(h.energy(x), x);
                }
                ledger.oracle += (n_w * batch.len()) as u64;
            }
        }

        let batch = batch.with_costs(costs.clone())?;
        let (mean_cost, grad) = objective_and_grad(&model, &batch, cfg.baseline)?;
        adam_step(&mut model, &mut adam, &grad)?;

        if checkpoint {
            let mode = model.mode_assignment();
            best.offer(h.energy(&mode), &mode);
            ledger.oracle += n_w as u64;
        }

        records.push(EpochRecord {
            epoch,
            queries: ledger.total,
            mean_cost,
            best_cost: best.cost,
            best_assignment: best.assignment.clone(),
        });
    }

    let (final_assignment, final_cost) = match cfg.readout {
        Readout::BestScored => (best.assignment.clone(), best.cost),
        Readout::Sample => {
            let mut readout_rng = rng::stream(cfg.seed, READOUT_STREAM);
            let mut pick = Best::new(n);
            for x in model.sample_batch(cfg.n_b, &mut readout_rng)?.samples {
                pick.offer(h.energy(&x), &x);
            }
            ledger.oracle += (n_w * cfg.n_b) as u64;
            (pick.assignment, pick.cost)
        }
    };

    Ok(RunTrace {
        algorithm,
        estimator_mode: matches!(algorithm, Algorithm::Qimf).then_some(cfg.estimator_mode),
        seed: cfg.seed,
        n_w,
        n_s: if algorithm == Algorithm::Qimf {
            cfg.n_s
        } else {
            n_w
        },
        n_b: cfg.n_b,
        records,
        ledger,
        best_assignment: best.assignment,
        best_cost: best.cost,
        final_assignment,
        final_cost,
        fixed: None,
        seconds: 0.0,
    })
}
