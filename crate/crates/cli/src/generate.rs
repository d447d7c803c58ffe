use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use qimf_core::estimator::{shot_count_block, shot_count_simple};
use qimf_core::hamiltonian::instance_hamiltonian;
use qimf_core::instance::generate_wsbm;
use qimf_core::problems::{build_ising, build_maxcut, ising_instance, wsbm_portfolio, Graph};
use qimf_core::{QuboInstance, WeightDistribution, WsbmSpec};

#[derive(Subcommand, Debug)]
pub enum GenerateCommand {
    /// Weighted stochastic block model matrix, optionally with random returns.
    Wsbm(WsbmArgs),
    /// Max-cut instance from an edge list (`u v w` per line).
    Maxcut(EdgeArgs),
    /// Ising instance from a coupling list (`i j J` per line; `i i h` is a field).
    Ising(EdgeArgs),
}

#[derive(Args, Debug)]
pub struct WsbmArgs {
    /// Block sizes: `10x5` (five blocks of 10), `4`, or `10,8,6`.
    #[arg(long)]
    blocks: String,
    /// Intra-block edge probability.
    #[arg(long)]
    p_diag: f64,
    /// Inter-block edge probability.
    #[arg(long, default_value_t = 0.0)]
    p_off: f64,
    /// Intra-block weights: `norm:MEAN,STD`, `exp:RATE`, `unif:LO,HI` or `const:V`.
    #[arg(long)]
    w_diag: WeightDistribution,
    /// Inter-block weights; defaults to the intra-block distribution.
    #[arg(long)]
    w_off: Option<WeightDistribution>,
    /// Return distribution; turns the matrix into a portfolio risk matrix.
    #[arg(long)]
    returns: Option<WeightDistribution>,
    /// Risk weight used with `--returns`.
    #[arg(long, default_value_t = 0.5, requires = "returns")]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
pub struct EdgeArgs {
    #[arg(long, value_name = "PATH")]
    from_edges: PathBuf,
    /// Node count; defaults to the largest index plus one.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(short, long)]
    output: PathBuf,
}

fn parse_blocks(s: &str) -> Result<Vec<usize>> {
    let sizes: Vec<usize> = if let Some((size, count)) = s.split_once('x') {
        let size: usize = size
            .trim()
            .parse()
            .with_context(|| format!("bad block size in {s:?}"))?;
        let count: usize = count
            .trim()
            .parse()
            .with_context(|| format!("bad block count in {s:?}"))?;
        vec![size; count]
    } else {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .with_context(|| format!("bad block size {t:?}"))
            })
            .collect::<Result<_>>()?
    };
    if sizes.is_empty() || sizes.contains(&0) {
        bail!("block sizes must be positive: {s:?}");
    }
    Ok(sizes)
}

pub fn run(cmd: GenerateCommand) -> Result<()> {
    match cmd {
        GenerateCommand::Wsbm(a) => wsbm(a),
        GenerateCommand::Maxcut(a) => {
            let g = read_graph(&a.from_edges, a.nodes)?;
            finish(build_maxcut(&g), &a.output, None)
        }
        GenerateCommand::Ising(a) => {
            let text = read(&a.from_edges)?;
            let (couplings, fields, n) = parse_couplings(&text, &a.from_edges, a.nodes)?;
            let h = build_ising(&couplings, &fields, n)?;
            finish(ising_instance(&h)?, &a.output, None)
        }
    }
}

fn wsbm(a: WsbmArgs) -> Result<()> {
    let sizes = parse_blocks(&a.blocks)?;
    let w_off = a.w_off.unwrap_or(a.w_diag);
    let spec = WsbmSpec::planted(sizes, a.p_diag, a.p_off, a.w_diag, w_off);
    let inst = match &a.returns {
        Some(r) => wsbm_portfolio(&spec, r, a.lambda, a.seed)?,
        None => generate_wsbm(&spec, a.seed)?,
    };
    finish(inst, &a.output, Some((a.p_off, a.p_diag)))
}

fn finish(inst: QuboInstance, output: &Path, densities: Option<(f64, f64)>) -> Result<()> {
    let n_w = instance_hamiltonian(&inst)?.num_terms();
    let blocks = inst.num_blocks();
    inst.save(output)?;
    let block = match densities.or_else(|| inst.block_densities().map(|(q, p)| (p, q))) {
        Some((p, q)) => shot_count_block(n_w, blocks, p, q)
            .map(|n| n.to_string())
            .unwrap_or_else(|_| "n/a".into()),
        None => n_w.to_string(),
    };
    println!(
        "wrote {}: num_vars={} n_w={} blocks={} ns_simple={} ns_block={}",
        output.display(),
        inst.num_vars,
        n_w,
        blocks,
        shot_count_simple(n_w, blocks),
        block
    );
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_graph(path: &Path, nodes: Option<usize>) -> Result<Graph> {
    Ok(Graph::parse_edge_list(&read(path)?, path, nodes)?)
}

type Couplings = (Vec<(usize, usize, f64)>, Vec<(usize, f64)>, usize);

fn parse_couplings(text: &str, origin: &Path, nodes: Option<usize>) -> Result<Couplings> {
    let mut couplings = Vec::new();
    let mut fields = Vec::new();
    let mut n = 0;
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let parsed = match parts.as_slice() {
            [i, j, c] => match (i.parse::<usize>(), j.parse::<usize>(), c.parse::<f64>()) {
                (Ok(i), Ok(j), Ok(c)) if c.is_finite() => Some((i, j, c)),
                _ => None,
            },
            _ => None,
        };
        let Some((i, j, c)) = parsed else {
            bail!(
                "{}: line {}: expected `i j value`, found {line:?}",
                origin.display(),
                k + 1
            );
        };
        n = n.max(i.max(j) + 1);
        if i == j {
            fields.push((i, c));
        } else {
            couplings.push((i, j, c));
        }
    }
    let n = match nodes {
        Some(m) if m < n => bail!("{}: index {} exceeds --nodes {m}", origin.display(), n - 1),
        Some(m) => m,
        None => n,
    };
    Ok((couplings, fields, n))
}
