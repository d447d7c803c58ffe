use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{Context, Result};
use qimf_core::estimator::{shot_count_block, shot_count_simple};
use qimf_core::hamiltonian::instance_hamiltonian;
use qimf_core::{IsingHamiltonian, QuboInstance, RunTrace};

/// `--ns` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotChoice {
    Fixed(usize),
    /// `⌈n_w / N⌉` with `N` the number of block labels.
    AutoSimple,
    /// Block heuristic using the observed intra/inter edge densities.
    AutoBlock,
    /// Every term.
    All,
}

impl FromStr for ShotChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto-simple" | "auto" => Ok(ShotChoice::AutoSimple),
            "auto-block" => Ok(ShotChoice::AutoBlock),
            "all" => Ok(ShotChoice::All),
            _ => match s.parse::<usize>() {
                Ok(0) => Err("shot count must be at least 1".into()),
                Ok(n) => Ok(ShotChoice::Fixed(n)),
                Err(_) => Err(format!(
                    "expected an integer, auto-simple, auto-block or all, got {s:?}"
                )),
            },
        }
    }
}

/// Resolves the shot count against the Hamiltonian actually being solved.
pub fn resolve_shots(choice: ShotChoice, inst: &QuboInstance, n_w: usize) -> Result<usize> {
    let n = match choice {
        ShotChoice::Fixed(n) => n,
        ShotChoice::All => n_w,
        ShotChoice::AutoSimple => shot_count_simple(n_w, inst.num_blocks()),
        ShotChoice::AutoBlock => match inst.block_densities() {
            Some((q, p)) if p > 0.0 => shot_count_block(n_w, inst.num_blocks(), p, q)?,
            Some(_) => shot_count_simple(n_w, inst.num_blocks()),
            None => n_w,
        },
    };
    Ok(n.max(1))
}

pub fn load_problem(path: &Path) -> Result<(QuboInstance, IsingHamiltonian)> {
    let inst = QuboInstance::load(path)?;
    let h = instance_hamiltonian(&inst)
        .with_context(|| format!("{}: cannot build hamiltonian", path.display()))?;
    Ok((inst, h))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// Seeds as `a..b` (inclusive), a comma list, or a single value.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let a: u64 = a
            .trim()
            .parse()
            .map_err(|_| format!("bad seed range {s:?}"))?;
        let b: u64 = b
            .trim()
            .parse()
            .map_err(|_| format!("bad seed range {s:?}"))?;
        if a > b {
            return Err(format!("empty seed range {s:?}"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| format!("bad seed {t:?}"))
        })
        .collect()
}

pub fn is_maxcut(inst: &QuboInstance) -> bool {
    inst.metadata.get("problem").map(String::as_str) == Some("maxcut")
}

/// CSV trace; the epoch column is `queries / (n_s·n_b)`.
pub fn trace_csv(trace: &RunTrace, n_s: usize, n_b: usize) -> String {
    let unit = (n_s.max(1) * n_b.max(1)) as f64;
    let mut out = String::from("epoch,queries,mean_cost,best_cost\n");
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.queries as f64 / unit,
            r.queries,
            r.mean_cost,
            r.best_cost
        );
    }
    out
}
