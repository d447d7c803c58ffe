//! Multi-algorithm, multi-seed runs at a shared query budget.
//!
//! Mean-field solvers get `budget / (per-epoch queries)` epochs; the
//! exact-evaluation baselines get `budget / n_w` evaluations. Cells run on a
//! rayon pool and are collected in (algorithm, seed) order, so the report is
//! independent of `--jobs`.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use qimf_core::solver::solve;
use qimf_core::{Algorithm, IsingHamiltonian, SolverConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::common::{is_maxcut, load_problem, parse_seeds, write_file};
use crate::solve::SolverArgs;

#[derive(Args, Debug)]
pub struct BenchArgs {
    instance: PathBuf,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "qimf,quamf,sa,greedy,oneplusone"
    )]
    algos: Vec<Algorithm>,
    /// `1..10` (inclusive), a comma list, or one seed.
    #[arg(long, default_value = "1..10", value_parser = |s: &str| parse_seeds(s).map(Seeds))]
    seeds: Seeds,
    /// Total queries per run; defaults to QIMF's `n_s·n_b·n_e`.
    #[arg(long)]
    budget_queries: Option<u64>,
    /// Epochs used to derive the default budget.
    #[arg(long = "ne", default_value_t = 1000)]
    n_e: usize,
    #[command(flatten)]
    solver: SolverArgs,
    /// Reference score from an external solver, e.g. `gurobi=-12.95`.
    #[arg(long = "extern", value_name = "NAME=VALUE", value_parser = parse_extern)]
    externals: Vec<(String, f64)>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Machine-readable report.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct Seeds(Vec<u64>);

fn parse_extern(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("bad value in {s:?}"))?;
    if name.trim().is_empty() {
        return Err(format!("empty name in {s:?}"));
    }
    Ok((name.trim().to_string(), value))
}

#[derive(Debug, Serialize)]
struct RunRow {
    algo: String,
    seed: u64,
    final_cost: Option<f64>,
    best_cost: Option<f64>,
    queries: Option<u64>,
    seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failed: Option<String>,
}

#[derive(Debug, Serialize)]
struct Aggregate {
    algo: String,
    mean: f64,
    std: f64,
    n: usize,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    external: bool,
}

#[derive(Debug, Serialize)]
struct Report {
    /// `cost` (lower is better) or `cut` (higher is better).
    score: &'static str,
    budget_queries: u64,
    runs: Vec<RunRow>,
    aggregates: Vec<Aggregate>,
}

/// Run length giving at most `budget` queries (at least one unit).
pub fn epochs_for_budget(algo: Algorithm, budget: u64, n_w: u64, n_s: u64, n_b: u64) -> usize {
    let n_w = n_w.max(1);
    let n = match algo {
        Algorithm::Qimf => budget / (n_s * n_b),
        Algorithm::Quamf => budget / (n_w * n_b),
        // One extra evaluation scores the starting point.
        Algorithm::Sa | Algorithm::OnePlusOne => (budget / n_w).saturating_sub(1),
        Algorithm::Greedy => budget / n_w,
        Algorithm::BruteForce => 1,
    };
    n.max(1) as usize
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let std = if v.len() > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

fn run_cell(
    h: &IsingHamiltonian,
    base: &SolverConfig,
    algo: Algorithm,
    n_e: usize,
    seed: u64,
) -> RunRow {
    let mut cfg = base.clone();
    cfg.algorithm = algo;
    cfg.n_e = n_e;
    cfg.seed = seed;
    match solve(h, &cfg) {
        Ok(t) => RunRow {
            algo: algo.name().into(),
            seed,
            final_cost: Some(t.final_cost),
            best_cost: Some(t.best_cost),
            queries: Some(t.ledger.total),
            seconds: Some(t.seconds),
            failed: None,
        },
        Err(e) => RunRow {
            algo: algo.name().into(),
            seed,
            final_cost: None,
            best_cost: None,
            queries: None,
            seconds: None,
            failed: Some(e.to_string()),
        },
    }
}

pub fn run(a: BenchArgs) -> Result<()> {
    if a.algos.is_empty() || a.seeds.0.is_empty() {
        bail!("need at least one algorithm and one seed");
    }
    let (inst, h) = load_problem(&a.instance)?;
    let (base, n_s) = a.solver.config(Algorithm::Qimf, &inst, &h)?;
    let n_w = h.num_terms() as u64;
    let n_b = base.n_b as u64;
    let budget = a.budget_queries.unwrap_or(n_s as u64 * n_b * a.n_e as u64);
    let cut = is_maxcut(&inst);

    let cells: Vec<(Algorithm, u64)> = a
        .algos
        .iter()
        .flat_map(|&algo| a.seeds.0.iter().map(move |&s| (algo, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.max(1))
        .build()?;
    let runs: Vec<RunRow> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(algo, seed)| {
                let n_e = epochs_for_budget(algo, budget, n_w, n_s as u64, n_b);
                run_cell(&h, &base, algo, n_e, seed)
            })
            .collect()
    });

    let score = |c: f64| if cut { -c } else { c };
    let mut aggregates = Vec::new();
    let mut table_rows = Vec::new();
    for &algo in &a.algos {
        let mine: Vec<&RunRow> = runs.iter().filter(|r| r.algo == algo.name()).collect();
        let scores: Vec<f64> = mine
            .iter()
            .filter_map(|r| r.final_cost.map(score))
            .collect();
        let failures = mine.len() - scores.len();
        if scores.is_empty() {
            table_rows.push([
                algo.name().to_string(),
                "0".into(),
                "failed".into(),
                "-".into(),
                "-".into(),
                "-".into(),
            ]);
            continue;
        }
        let (mean, std) = mean_std(&scores);
        let best = if cut {
            scores.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        } else {
            scores.iter().copied().fold(f64::INFINITY, f64::min)
        };
        let queries = mine.iter().filter_map(|r| r.queries).max().unwrap_or(0);
        let name = if failures > 0 {
            format!("{} ({failures} failed)", algo.name())
        } else {
            algo.name().to_string()
        };
        table_rows.push([
            name,
            scores.len().to_string(),
            format!("{mean:.6}"),
            format!("{std:.6}"),
            format!("{best:.6}"),
            queries.to_string(),
        ]);
        aggregates.push(Aggregate {
            algo: algo.name().into(),
            mean,
            std,
            n: scores.len(),
            external: false,
        });
    }
    for (name, value) in &a.externals {
        table_rows.push([
            format!("{name} (external)"),
            "1".into(),
            format!("{value:.6}"),
            "-".into(),
            format!("{value:.6}"),
            "-".into(),
        ]);
        aggregates.push(Aggregate {
            algo: name.clone(),
            mean: *value,
            std: 0.0,
            n: 1,
            external: true,
        });
    }

    let header = [
        "algo",
        "runs",
        if cut { "mean cut" } else { "mean cost" },
        "std",
        "best",
        "queries",
    ];
    print!("{}", render_table(&header, &table_rows));
    println!("budget {budget} queries per run, n_w={n_w}, n_s={n_s}, n_b={n_b}");

    let failed = runs.iter().filter(|r| r.failed.is_some()).count();
    if let Some(path) = &a.json {
        let report = Report {
            score: if cut { "cut" } else { "cost" },
            budget_queries: budget,
            runs,
            aggregates,
        };
        write_file(path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    if failed > 0 {
        bail!("{failed} run(s) failed");
    }
    Ok(())
}

fn render_table(header: &[&str; 6], rows: &[[String; 6]]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[&str]| {
        for (k, (cell, w)) in cells.iter().zip(&width).enumerate() {
            if k == 0 {
                let _ = write!(out, "{cell:<w$}");
            } else {
                let _ = write!(out, "  {cell:>w$}");
            }
        }
        out.push('\n');
    };
    line(&mut out, header);
    let rule: Vec<String> = width.iter().map(|&w| "-".repeat(w)).collect();
    line(
        &mut out,
        &rule.iter().map(String::as_str).collect::<Vec<_>>(),
    );
    for row in rows {
        line(
            &mut out,
            &row.iter().map(String::as_str).collect::<Vec<_>>(),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budgets_stay_within_one_epoch() {
        let (budget, n_w, n_s, n_b) = (100_000u64, 146u64, 30u64, 40u64);
        let q = epochs_for_budget(Algorithm::Qimf, budget, n_w, n_s, n_b) as u64 * n_s * n_b;
        let u = epochs_for_budget(Algorithm::Quamf, budget, n_w, n_s, n_b) as u64 * n_w * n_b;
        let sa = (epochs_for_budget(Algorithm::Sa, budget, n_w, n_s, n_b) as u64 + 1) * n_w;
        for total in [q, u, sa] {
            assert!(total <= budget && budget - total < n_w * n_b, "{total}");
        }
    }

    #[test]
    fn extern_values() {
        assert_eq!(
            parse_extern("gurobi=-12.95").unwrap(),
            ("gurobi".into(), -12.95)
        );
        assert!(parse_extern("gurobi").is_err());
        assert!(parse_extern("=1").is_err());
    }

    #[test]
    fn dispersion_uses_sample_std() {
        assert_eq!(mean_std(&[1.0]), (1.0, 0.0));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn table_alignment() {
        let t = render_table(
            &["a", "b", "c", "d", "e", "f"],
            &[[
                "long".into(),
                "1".into(),
                "2".into(),
                "3".into(),
                "4".into(),
                "5".into(),
            ]],
        );
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().all(|l| l.len() == lines[0].len()));
    }
}
