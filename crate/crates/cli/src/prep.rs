use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use qimf_core::estimator::shot_count_simple;
use qimf_core::hamiltonian::{ising_to_qubo, preprocess_dominant};
use qimf_core::problems::{ingest_prices, portfolio_instance};
use qimf_core::FixedVars;
use serde::Serialize;

use crate::common::{load_problem, write_file};

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Long-format prices: `date,ticker,close`.
    #[arg(long)]
    prices: PathBuf,
    /// Sector map: `ticker,sector`.
    #[arg(long)]
    sectors: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    /// Multiplier on mean daily returns (e.g. 252 to annualize).
    #[arg(long, default_value_t = 1.0)]
    return_scale: f64,
    #[arg(short, long)]
    output: PathBuf,
}

pub fn ingest(a: IngestArgs) -> Result<()> {
    let data = ingest_prices(&a.prices, &a.sectors)?;
    let inst = portfolio_instance(&data, a.lambda, a.return_scale)?;
    let n_w = qimf_core::hamiltonian::instance_hamiltonian(&inst)?.num_terms();
    inst.save(&a.output)?;
    println!(
        "wrote {}: num_vars={} sectors={} n_w={} ns_simple={}",
        a.output.display(),
        inst.num_vars,
        data.sector_names.len(),
        n_w,
        shot_count_simple(n_w, data.sector_names.len())
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct PreprocessArgs {
    instance: PathBuf,
    /// Reduced instance.
    #[arg(short, long)]
    output: PathBuf,
    /// Fixed variables as JSON.
    #[arg(long)]
    fixed: PathBuf,
}

#[derive(Serialize)]
struct FixedFile<'a> {
    num_vars: usize,
    fixed: &'a FixedVars,
    /// Original index of each reduced variable.
    remaining: &'a [usize],
}

pub fn preprocess(a: PreprocessArgs) -> Result<()> {
    let (inst, h) = load_problem(&a.instance)?;
    let pre = preprocess_dominant(&h)?;
    let reduced = if pre.fixed.is_empty() {
        inst.clone()
    } else {
        let mut r = ising_to_qubo(&pre.hamiltonian)?;
        for (k, v) in &inst.metadata {
            r.metadata.entry(k.clone()).or_insert_with(|| v.clone());
        }
        r.metadata
            .insert("reduced_from".into(), inst.num_vars.to_string());
        if let Some(labels) = &inst.block_labels {
            r.block_labels = Some(pre.remaining.iter().map(|&q| labels[q]).collect());
        }
        r
    };
    reduced.save(&a.output)?;
    let file = FixedFile {
        num_vars: inst.num_vars,
        fixed: &pre.fixed,
        remaining: &pre.remaining,
    };
    write_file(&a.fixed, &(serde_json::to_string_pretty(&file)? + "\n"))?;
    println!(
        "fixed {} of {} variables; {} remain",
        pre.fixed.len(),
        inst.num_vars,
        pre.remaining.len()
    );
    Ok(())
}
