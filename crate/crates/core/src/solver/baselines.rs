//! Classical baselines. Each exact evaluation is charged `n_w` queries;
//! `cfg.n_e` is the evaluation budget and `cfg.n_b` the record interval.

use rand::Rng;

use crate::error::Result;
use crate::hamiltonian::{Assignment, IsingHamiltonian};
use crate::rng::{self, StreamRng};

use super::{check_finite, Algorithm, Best, EpochRecord, QueryLedger, RunTrace, SolverConfig};

fn random_bits(n: usize, rng: &mut StreamRng) -> Vec<u8> {
    (0..n).map(|_| u8::from(rng.random::<bool>())).collect()
}

/// Cost change from flipping bit `i`: every term acting on `i` changes sign.
fn flip_delta(h: &IsingHamiltonian, incidence: &[Vec<usize>], x: &[u8], i: usize) -> f64 {
    let terms = h.terms();
    -2.0 * incidence[i]
        .iter()
        .map(|&m| terms[m].coefficient * terms[m].sign(x))
        .sum::<f64>()
}

/// Current cost and the flip delta of every bit, from one pass over the terms.
fn scan(h: &IsingHamiltonian, x: &[u8], deltas: &mut [f64]) -> f64 {
    deltas.iter_mut().for_each(|d| *d = 0.0);
    let mut sum = 0.0;
    for t in h.terms() {
        let v = t.coefficient * t.sign(x);
        sum += v;
        for &q in t.support() {
            deltas[q] -= 2.0 * v;
        }
    }
    h.offset + sum
}

/// Threshold below which a negative delta counts as an improvement.
fn improvement_tolerance(h: &IsingHamiltonian) -> f64 {
    let scale: f64 = h.terms().iter().map(|t| t.coefficient.abs()).sum();
    1e-12 * (1.0 + scale)
}

struct Recorder {
    records: Vec<EpochRecord>,
    interval: usize,
    chunk_sum: f64,
    chunk_len: usize,
}

impl Recorder {
    fn new(interval: usize) -> Self {
        Recorder {
            records: Vec::new(),
            interval,
            chunk_sum: 0.0,
            chunk_len: 0,
        }
    }

    fn observe(&mut self, cost: f64, best: &Best, ledger: &QueryLedger, last: bool) {
        self.chunk_sum += cost;
        self.chunk_len += 1;
        if self.chunk_len == self.interval || last {
            self.push(self.chunk_sum / self.chunk_len as f64, best, ledger);
            self.chunk_sum = 0.0;
            self.chunk_len = 0;
        }
    }

    fn push(&mut self, mean_cost: f64, best: &Best, ledger: &QueryLedger) {
        self.records.push(EpochRecord {
            epoch: self.records.len() + 1,
            queries: ledger.total,
            mean_cost,
            best_cost: best.cost,
            best_assignment: best.assignment.clone(),
        });
    }
}

fn finish(
    h: &IsingHamiltonian,
    cfg: &SolverConfig,
    algorithm: Algorithm,
    records: Vec<EpochRecord>,
    ledger: QueryLedger,
    best: Best,
) -> RunTrace {
    // Incremental bookkeeping can drift by rounding; report the exact value.
    let best_cost = h.energy(&best.assignment);
    RunTrace {
        algorithm,
        estimator_mode: None,
        seed: cfg.seed,
        n_w: h.num_terms(),
        n_s: h.num_terms(),
        n_b: cfg.n_b,
        records,
        ledger,
        final_assignment: best.assignment.clone(),
        final_cost: best_cost,
        best_assignment: best.assignment,
        best_cost,
        fixed: None,
        seconds: 0.0,
    }
}

/// Zero-variable problems: one record at the constant cost.
fn constant_trace(h: &IsingHamiltonian, cfg: &SolverConfig, algorithm: Algorithm) -> RunTrace {
    let mut ledger = QueryLedger::new(0);
    ledger.charge(1);
    let best = Best {
        cost: h.offset,
        assignment: Assignment::zeros(0),
    };
    let mut rec = Recorder::new(1);
    rec.push(h.offset, &best, &ledger);
    finish(h, cfg, algorithm, rec.records, ledger, best)
}

/// Single-bit-flip Metropolis annealing with a geometric schedule
/// `T_k = T_0·r^k`, `r` chosen so the last step runs at `T_0·sa_final_ratio`.
///
/// `T_0` defaults to the standard deviation of the single-flip cost changes
/// at the random start. `cfg.n_e` proposals, each charged `n_w`, plus the
/// initial evaluation.
pub fn simulated_annealing(h: &IsingHamiltonian, cfg: &SolverConfig) -> Result<RunTrace> {
    cfg.check()?;
    let n = h.num_qubits();
    if n == 0 {
        return Ok(constant_trace(h, cfg, Algorithm::Sa));
    }
    let n_w = h.num_terms() as u64;
    let mut rng = rng::stream(cfg.seed, "sa");
    let incidence = h.incidence();
    let mut ledger = QueryLedger::new(n_w * cfg.n_b as u64);

    let mut x = random_bits(n, &mut rng);
    let mut deltas = vec![0.0; n];
    let mut cost = check_finite(scan(h, &x, &mut deltas), "sa")?;
    ledger.charge(n_w);
    let mut best = Best::new(n);
    best.offer(cost, &x);

    let t0 = cfg.sa_initial_temperature.unwrap_or_else(|| {
        let mean = deltas.iter().sum::<f64>() / n as f64;
        let var = deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        if sd > 0.0 {
            sd
        } else {
            let m = deltas.iter().map(|d| d.abs()).sum::<f64>() / n as f64;
            if m > 0.0 {
                m
            } else {
                1.0
            }
        }
    });
    let ratio = if cfg.n_e > 1 {
        cfg.sa_final_ratio.powf(1.0 / (cfg.n_e - 1) as f64)
    } else {
        1.0
    };

    let mut temperature = t0;
    let mut rec = Recorder::new(cfg.n_b);
    for k in 0..cfg.n_e {
        let i = rng.random_range(0..n);
        let u: f64 = rng.random();
        let delta = flip_delta(h, &incidence, &x, i);
        let accept = delta <= 0.0 || (temperature > 0.0 && u < (-delta / temperature).exp());
        if accept {
            x[i] ^= 1;
            cost += delta;
            best.offer(cost, &x);
        }
        ledger.charge(n_w);
        rec.observe(cost, &best, &ledger, k + 1 == cfg.n_e);
        temperature *= ratio;
    }
    Ok(finish(h, cfg, Algorithm::Sa, rec.records, ledger, best))
}

/// Steepest single-flip descent from random starts.
///
/// One neighbourhood scan is one pass over all terms and is charged `n_w`;
/// `cfg.n_e` scans are available. The first descent always runs to a local
/// optimum; later ones stop when the budget is exhausted and an unfinished
/// descent is discarded, so every reported assignment is 1-flip optimal.
/// One record per descent.
pub fn greedy_local_search(h: &IsingHamiltonian, cfg: &SolverConfig) -> Result<RunTrace> {
    cfg.check()?;
    let n = h.num_qubits();
    if n == 0 {
        return Ok(constant_trace(h, cfg, Algorithm::Greedy));
    }
    let n_w = h.num_terms() as u64;
    let tol = improvement_tolerance(h);
    let mut rng = rng::stream(cfg.seed, "greedy");
    let mut ledger = QueryLedger::new(n_w);
    let mut best = Best::new(n);
    let mut rec = Recorder::new(1);
    let mut deltas = vec![0.0; n];
    let mut scans = 0usize;

    loop {
        let first = rec.records.is_empty();
        if !first && scans >= cfg.n_e {
            break;
        }
        let mut x = random_bits(n, &mut rng);
        let (cost, complete) = loop {
            let cost = check_finite(scan(h, &x, &mut deltas), "greedy")?;
            scans += 1;
            ledger.charge(n_w);
            let (i, d) =
                deltas
                    .iter()
                    .copied()
                    .enumerate()
                    .fold(
                        (0, f64::INFINITY),
                        |acc, (i, d)| if d < acc.1 { (i, d) } else { acc },
                    );
            if d >= -tol {
                break (cost, true);
            }
            if !first && scans >= cfg.n_e {
                break (cost, false);
            }
            x[i] ^= 1;
        };
        if complete {
            best.offer(cost, &x);
        }
        rec.push(cost, &best, &ledger);
    }
    Ok(finish(h, cfg, Algorithm::Greedy, rec.records, ledger, best))
}

/// Elitist (1+1) evolution: flip each bit with probability `1/n` (at least
/// one), keep the child if it is not worse. `cfg.n_e` children, each
/// charged `n_w`, plus the initial evaluation.
pub fn one_plus_one(h: &IsingHamiltonian, cfg: &SolverConfig) -> Result<RunTrace> {
    cfg.check()?;
    let n = h.num_qubits();
    if n == 0 {
        return Ok(constant_trace(h, cfg, Algorithm::OnePlusOne));
    }
    let n_w = h.num_terms() as u64;
    let mut rng = rng::stream(cfg.seed, "oneplusone");
    let mut ledger = QueryLedger::new(n_w * cfg.n_b as u64);
    let rate = 1.0 / n as f64;

    let mut x = random_bits(n, &mut rng);
    let mut cost = check_finite(h.energy(&x), "oneplusone")?;
    ledger.charge(n_w);
    let mut best = Best::new(n);
    best.offer(cost, &x);
    let mut rec = Recorder::new(cfg.n_b);
    let mut child = x.clone();

    for k in 0..cfg.n_e {
        child.copy_from_slice(&x);
        let mut flipped = false;
        for b in child.iter_mut() {
            if rng.random::<f64>() < rate {
                *b ^= 1;
                flipped = true;
            }
        }
        if !flipped {
            child[rng.random_range(0..n)] ^= 1;
        }
        let c = check_finite(h.energy(&child), "oneplusone")?;
        ledger.charge(n_w);
        if c <= cost {
            std::mem::swap(&mut x, &mut child);
            cost = c;
            best.offer(cost, &x);
        }
        rec.observe(cost, &best, &ledger, k + 1 == cfg.n_e);
    }
    Ok(finish(
        h,
        cfg,
        Algorithm::OnePlusOne,
        rec.records,
        ledger,
        best,
    ))
}
