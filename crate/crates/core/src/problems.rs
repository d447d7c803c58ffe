//! Builders for the benchmark problem families.
//!
//! * Portfolio selection: `λ·xᵀVx − (1−λ)·rᵀx`, folded into one matrix using `x_i² = x_i`.
//! * Weighted max-cut: minimize `−cut(x)`.
//! * Ising: `Σ J_ij Z_i Z_j + Σ h_i Z_i`.
//!
//! Price data is read from two CSV files: long-format closing prices
//! (`date,ticker,close`) and a sector map (`ticker,sector`).

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hamiltonian::{ising_to_qubo, IsingHamiltonian, PauliTerm};
use crate::instance::{
    generate_wsbm, QuboInstance, WeightDistribution, WsbmSpec, META_LAMBDA, META_PROBLEM,
};

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "lambda = {lambda} outside [0, 1]"
        )))
    }
}

/// `Q_ij = λ·V_ij` off the diagonal, `Q_ii = λ·V_ii − (1−λ)·r_i`.
pub fn build_portfolio(
    covariance: &[Vec<f64>],
    returns: &[f64],
    lambda: f64,
) -> Result<QuboInstance> {
    check_lambda(lambda)?;
    let n = covariance.len();
    if returns.len() != n {
        return Err(Error::Dimension(format!(
            "{} returns for a {n}×{n} covariance",
            returns.len()
        )));
    }
    for (i, row) in covariance.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Dimension(format!(
                "covariance row {i} has {} columns",
                row.len()
            )));
        }
        for j in 0..i {
            if row[j] != covariance[j][i] {
                return Err(Error::InvalidArgument(format!(
                    "covariance is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let mut inst = QuboInstance::new(n);
    for i in 0..n {
        inst.set(
            i,
            i,
            lambda * covariance[i][i] - (1.0 - lambda) * returns[i],
        );
        for j in i + 1..n {
            inst.set(i, j, lambda * covariance[i][j]);
        }
    }
    inst.metadata
        .insert(META_PROBLEM.into(), "portfolio".into());
    inst.metadata.insert(META_LAMBDA.into(), lambda.to_string());
    Ok(inst)
}

/// Closing prices aligned on a common set of dates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PriceTable {
    pub dates: Vec<String>,
    pub prices: BTreeMap<String, Vec<f64>>,
    pub sectors: BTreeMap<String, String>,
}

fn is_iso_date(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 10
        && b[4] == b'-'
        && b[7] == b'-'
        && b.iter()
            .enumerate()
            .all(|(k, c)| k == 4 || k == 7 || c.is_ascii_digit())
}

fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn expect_header(path: &Path, reader: &mut csv::Reader<fs::File>, expected: &[&str]) -> Result<()> {
    let header = reader
        .headers()
        .map_err(|e| Error::parse(path, "line 1", e.to_string()))?;
    let found: Vec<&str> = header.iter().collect();
    if found != expected {
        return Err(Error::parse(
            path,
            "line 1",
            format!(
                "expected header {}, found {}",
                expected.join(","),
                found.join(",")
            ),
        ));
    }
    Ok(())
}

impl PriceTable {
    /// Reads both CSV files. Dates on which any ticker lacks a price are
    /// dropped, so every ticker ends up with a price on every kept date.
    pub fn read(prices_path: &Path, sectors_path: &Path) -> Result<Self> {
        let mut rd = csv_reader(prices_path)?;
        expect_header(prices_path, &mut rd, &["date", "ticker", "close"])?;
        let mut raw: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for (k, rec) in rd.records().enumerate() {
            let line = format!("line {}", k + 2);
            let rec = rec.map_err(|e| Error::parse(prices_path, &line, e.to_string()))?;
            if rec.len() != 3 {
                return Err(Error::parse(prices_path, &line, "expected 3 fields"));
            }
            let (date, ticker, close) = (&rec[0], &rec[1], &rec[2]);
            if !is_iso_date(date) {
                return Err(Error::parse(
                    prices_path,
                    &line,
                    format!("bad date {date:?}"),
                ));
            }
            let close: f64 = close
                .parse()
                .map_err(|_| Error::parse(prices_path, &line, format!("bad price {close:?}")))?;
            if !(close > 0.0 && close.is_finite()) {
                return Err(Error::parse(
                    prices_path,
                    &line,
                    format!("price {close} for {ticker} on {date} is not positive"),
                ));
            }
            let slot = raw.entry(ticker.to_string()).or_default();
            if slot.insert(date.to_string(), close).is_some() {
                return Err(Error::parse(
                    prices_path,
                    &line,
                    format!("duplicate price for {ticker} on {date}"),
                ));
            }
        }
        if raw.is_empty() {
            return Err(Error::Ingest(format!(
                "{}: no prices",
                prices_path.display()
            )));
        }

        let mut rd = csv_reader(sectors_path)?;
        expect_header(sectors_path, &mut rd, &["ticker", "sector"])?;
        let mut sectors = BTreeMap::new();
        for (k, rec) in rd.records().enumerate() {
            let line = format!("line {}", k + 2);
            let rec = rec.map_err(|e| Error::parse(sectors_path, &line, e.to_string()))?;
            if rec.len() != 2 {
                return Err(Error::parse(sectors_path, &line, "expected 2 fields"));
            }
            let ticker = rec[0].to_string();
            if !raw.contains_key(&ticker) {
                return Err(Error::parse(
                    sectors_path,
                    &line,
                    format!("unknown ticker {ticker:?} (no prices)"),
                ));
            }
            let sector = if rec[1].is_empty() {
                "UNKNOWN"
            } else {
                &rec[1]
            };
            if sectors.insert(ticker.clone(), sector.to_string()).is_some() {
                return Err(Error::parse(
                    sectors_path,
                    &line,
                    format!("duplicate ticker {ticker:?}"),
                ));
            }
        }
        if let Some(t) = raw.keys().find(|t| !sectors.contains_key(*t)) {
            return Err(Error::Ingest(format!(
                "{}: ticker {t:?} has no sector",
                sectors_path.display()
            )));
        }

        let all_dates: BTreeSet<&String> = raw.values().flat_map(|m| m.keys()).collect();
        let dates: Vec<String> = all_dates
            .into_iter()
            .filter(|d| raw.values().all(|m| m.contains_key(*d)))
            .cloned()
            .collect();
        let prices = raw
            .iter()
            .map(|(t, m)| (t.clone(), dates.iter().map(|d| m[d]).collect()))
            .collect();
        Ok(PriceTable {
            dates,
            prices,
            sectors,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestedPortfolio {
    /// Tickers in block-contiguous order (by sector name, then ticker).
    pub tickers: Vec<String>,
    pub sector_names: Vec<String>,
    pub block_labels: Vec<usize>,
    pub mean_returns: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

/// Simple daily returns, their per-ticker mean, and the sample covariance
/// (denominator `T − 1`).
pub fn portfolio_statistics(table: &PriceTable) -> Result<IngestedPortfolio> {
    if table.dates.len() < 3 {
        return Err(Error::Ingest(format!(
            "need at least 3 dates with complete prices, found {}",
            table.dates.len()
        )));
    }
    let mut order: Vec<(&String, &String)> = table
        .prices
        .keys()
        .map(|t| (&table.sectors[t], t))
        .collect();
    order.sort();
    let sector_names: Vec<String> = order
        .iter()
        .map(|(s, _)| (*s).clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let block_labels = order
        .iter()
        .map(|(s, _)| sector_names.binary_search(s).expect("sector listed"))
        .collect();
    let tickers: Vec<String> = order.iter().map(|(_, t)| (*t).clone()).collect();

    let returns: Vec<Vec<f64>> = tickers
        .iter()
        .map(|t| {
            table.prices[t]
                .windows(2)
                .map(|w| w[1] / w[0] - 1.0)
                .collect()
        })
        .collect();
    let periods = returns[0].len() as f64;
    let mean_returns: Vec<f64> = returns
        .iter()
        .map(|r| r.iter().sum::<f64>() / periods)
        .collect();
    let n = tickers.len();
    let mut covariance = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let c = returns[i]
                .iter()
                .zip(&returns[j])
                .map(|(a, b)| (a - mean_returns[i]) * (b - mean_returns[j]))
                .sum::<f64>()
                / (periods - 1.0);
            covariance[i][j] = c;
            covariance[j][i] = c;
        }
    }
    Ok(IngestedPortfolio {
        tickers,
        sector_names,
        block_labels,
        mean_returns,
        covariance,
    })
}

pub fn ingest_prices(prices_path: &Path, sectors_path: &Path) -> Result<IngestedPortfolio> {
    portfolio_statistics(&PriceTable::read(prices_path, sectors_path)?)
}

/// Portfolio instance from ingested data. `return_scale` multiplies the
/// mean daily returns (e.g. 252 to annualize).
pub fn portfolio_instance(
    data: &IngestedPortfolio,
    lambda: f64,
    return_scale: f64,
) -> Result<QuboInstance> {
    let r: Vec<f64> = data.mean_returns.iter().map(|r| r * return_scale).collect();
    let mut inst = build_portfolio(&data.covariance, &r, lambda)?;
    inst.block_labels = Some(data.block_labels.clone());
    inst.metadata
        .insert("returns".into(), "simple-daily-mean".into());
    inst.metadata
        .insert("return_scale".into(), return_scale.to_string());
    inst.metadata
        .insert("risk".into(), "sample-covariance".into());
    inst.metadata
        .insert("tickers".into(), data.tickers.join(","));
    inst.metadata
        .insert("sectors".into(), data.sector_names.join(","));
    Ok(inst)
}

/// Block-model risk matrix with random returns: the instance stores the
/// sampled matrix as-is, `r` in `linear`, and `λ` in metadata, so its
/// cost is `λ·xᵀVx − (1−λ)·rᵀx`. Returns use their own stream.
pub fn wsbm_portfolio(
    spec: &WsbmSpec,
    returns: &WeightDistribution,
    lambda: f64,
    seed: u64,
) -> Result<QuboInstance> {
    check_lambda(lambda)?;
    returns.check()?;
    let mut inst = generate_wsbm(spec, seed)?;
    let mut rng = crate::rng::stream(seed, RETURNS_STREAM);
    inst.linear = Some(
        (0..inst.num_vars)
            .map(|_| returns.sample(&mut rng))
            .collect(),
    );
    inst.metadata
        .insert(META_PROBLEM.into(), "portfolio".into());
    inst.metadata.insert(META_LAMBDA.into(), lambda.to_string());
    inst.metadata
        .insert("returns_dist".into(), returns.to_string());
    Ok(inst)
}

const RETURNS_STREAM: &str = "wsbm/returns";

/// Weighted undirected graph; edges stored with `u < v`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Graph {
    pub num_nodes: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl Graph {
    pub fn new(num_nodes: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop on node {u}")));
            }
            let (u, v) = (u.min(v), u.max(v));
            if v >= num_nodes {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) outside {num_nodes} nodes"
                )));
            }
            if !w.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) has weight {w}"
                )));
            }
            if !seen.insert((u, v)) {
                return Err(Error::InvalidArgument(format!("duplicate edge ({u}, {v})")));
            }
            out.push((u, v, w));
        }
        Ok(Graph {
            num_nodes,
            edges: out,
        })
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Parses `u v w` lines; blank lines and `#` comments are skipped. The
    /// node count is the largest index plus one unless given.
    pub fn parse_edge_list(text: &str, origin: &Path, num_nodes: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let loc = format!("line {}", k + 1);
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::parse(origin, loc, "expected `u v w`"));
            }
            let u = fields[0].parse::<usize>();
            let v = fields[1].parse::<usize>();
            let w = fields[2].parse::<f64>();
            match (u, v, w) {
                (Ok(u), Ok(v), Ok(w)) => edges.push((u, v, w)),
                _ => return Err(Error::parse(origin, loc, format!("cannot parse {line:?}"))),
            }
        }
        let n = num_nodes.unwrap_or_else(|| {
            edges
                .iter()
                .map(|&(u, v, _)| u.max(v) + 1)
                .max()
                .unwrap_or(0)
        });
        Graph::new(n, &edges).map_err(|e| Error::parse(origin, "edges", e.to_string()))
    }

    pub fn cut_value(&self, x: &[u8]) -> f64 {
        self.edges
            .iter()
            .filter(|&&(u, v, _)| x[u] != x[v])
            .map(|&(_, _, w)| w)
            .sum()
    }
}

/// `xᵀQx = −cut(x)`: `Q_uv = w` per edge and `Q_uu −= w` for each incident edge.
pub fn build_maxcut(g: &Graph) -> QuboInstance {
    let mut inst = QuboInstance::new(g.num_nodes);
    for &(u, v, w) in &g.edges {
        inst.add(u, v, w);
        inst.add(u, u, -w);
        inst.add(v, v, -w);
    }
    inst.metadata.insert(META_PROBLEM.into(), "maxcut".into());
    inst
}

/// Graph from the off-diagonal entries of an instance (e.g. a block-model sample).
pub fn graph_from_instance(inst: &QuboInstance) -> Graph {
    let edges: Vec<(usize, usize, f64)> = inst
        .entries
        .iter()
        .filter(|(&(i, j), _)| i != j)
        .map(|(&(i, j), &w)| (i, j, w))
        .collect();
    Graph::new(inst.num_vars, &edges).expect("instance entries are canonical")
}

/// `Σ J_ij Z_i Z_j + Σ h_i Z_i` with zero offset.
pub fn build_ising(
    couplings: &[(usize, usize, f64)],
    fields: &[(usize, f64)],
    num_qubits: usize,
) -> Result<IsingHamiltonian> {
    let mut terms = Vec::with_capacity(couplings.len() + fields.len());
    let mut pairs = BTreeSet::new();
    for &(i, j, c) in couplings {
        if i == j {
            return Err(Error::InvalidArgument(format!(
                "coupling ({i}, {j}) is diagonal"
            )));
        }
        if !pairs.insert((i.min(j), i.max(j))) {
            return Err(Error::InvalidArgument(format!(
                "duplicate coupling ({i}, {j})"
            )));
        }
        if c != 0.0 {
            terms.push(PauliTerm::z(c, &[i, j])?);
        }
    }
    let mut sites = BTreeSet::new();
    for &(i, h) in fields {
        if !sites.insert(i) {
            return Err(Error::InvalidArgument(format!(
                "duplicate field on site {i}"
            )));
        }
        if h != 0.0 {
            terms.push(PauliTerm::z(h, &[i])?);
        }
    }
    IsingHamiltonian::new(num_qubits, terms, 0.0)
}

/// Ising couplings `J_ij = V_ij` (`i < j`) and fields `h_i = V_ii` taken from an instance.
pub fn ising_from_instance(inst: &QuboInstance) -> Result<IsingHamiltonian> {
    let mut couplings = Vec::new();
    let mut fields = Vec::new();
    for (&(i, j), &v) in &inst.entries {
        if i == j {
            fields.push((i, v));
        } else {
            couplings.push((i, j, v));
        }
    }
    build_ising(&couplings, &fields, inst.num_vars)
}

/// Ising Hamiltonian stored in the instance format.
pub fn ising_instance(h: &IsingHamiltonian) -> Result<QuboInstance> {
    let mut inst = ising_to_qubo(h)?;
    inst.metadata.insert(META_PROBLEM.into(), "ising".into());
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::instance_hamiltonian;
    use crate::solver::brute_force;
    use std::io::Write;

    fn bits(n: usize) -> impl Iterator<Item = Vec<u8>> {
        (0u32..1 << n).map(move |k| (0..n).map(|i| ((k >> i) & 1) as u8).collect())
    }

    #[test]
    fn portfolio_extremes() {
        let v = vec![vec![0.2, 0.1], vec![0.1, 0.3]];
        let r = [0.1, -0.4];
        let q = build_portfolio(&v, &r, 1.0).unwrap();
        assert_eq!(q.get(0, 0), 0.2);
        assert_eq!(q.get(0, 1), 0.1);
        assert_eq!(q.get(1, 1), 0.3);

        let q = build_portfolio(&v, &r, 0.0).unwrap();
        assert_eq!(q.num_entries(), 2);
        assert_eq!(q.get(0, 0), -0.1);
        assert_eq!(q.get(1, 1), 0.4);
        let h = instance_hamiltonian(&q).unwrap();
        assert_eq!(brute_force(&h).unwrap().0 .0, vec![1, 0]);
    }

    #[test]
    fn balanced_portfolio_matches_direct_objective() {
        let v = vec![vec![0.2, 0.1], vec![0.1, 0.3]];
        let r = [0.1, 0.4];
        let q = build_portfolio(&v, &r, 0.5).unwrap();
        let h = instance_hamiltonian(&q).unwrap();
        let mut best = (f64::INFINITY, vec![]);
        for x in bits(2) {
            let xf: Vec<f64> = x.iter().map(|&b| f64::from(b)).collect();
            let risk: f64 = (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(i, j)| xf[i] * v[i][j] * xf[j])
                .sum();
            let ret = r[0] * xf[0] + r[1] * xf[1];
            let direct = 0.5 * risk - 0.5 * ret;
            assert!((h.evaluate_full(&x).unwrap() - direct).abs() < 1e-12);
            if direct < best.0 {
                best = (direct, x.clone());
            }
        }
        assert_eq!(brute_force(&h).unwrap().0 .0, best.1);
    }

    #[test]
    fn portfolio_rejects_mismatch() {
        assert!(build_portfolio(&[vec![1.0]], &[1.0, 2.0], 0.5).is_err());
        assert!(build_portfolio(&[vec![1.0, 0.2], vec![0.3, 1.0]], &[1.0, 2.0], 0.5).is_err());
        assert!(build_portfolio(&[vec![1.0]], &[1.0], 1.5).is_err());
    }

    fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        fs::File::create(&p)
            .unwrap()
            .write_all(body.as_bytes())
            .unwrap();
        p
    }

    #[test]
    fn single_ticker_statistics() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "p.csv",
            "date,ticker,close\n2023-01-02,AAA,100\n2023-01-03,AAA,110\n2023-01-04,AAA,99\n",
        );
        let s = write(dir.path(), "s.csv", "ticker,sector\nAAA,Tech\n");
        let data = ingest_prices(&p, &s).unwrap();
        assert!(data.mean_returns[0].abs() < 1e-12);
        assert!((data.covariance[0][0] - 0.02).abs() < 1e-12);
    }

    #[test]
    fn constant_prices_give_zero_statistics() {
        let dir = tempfile::tempdir().unwrap();
        let mut body = String::from("date,ticker,close\n");
        for d in ["2023-01-02", "2023-01-03", "2023-01-04", "2023-01-05"] {
            body.push_str(&format!("{d},AAA,50\n{d},BBB,7.5\n"));
        }
        let p = write(dir.path(), "p.csv", &body);
        let s = write(dir.path(), "s.csv", "ticker,sector\nAAA,X\nBBB,Y\n");
        let data = ingest_prices(&p, &s).unwrap();
        assert_eq!(data.mean_returns, vec![0.0, 0.0]);
        assert!(data.covariance.iter().flatten().all(|&c| c == 0.0));
        let inst = portfolio_instance(&data, 0.5, 1.0).unwrap();
        assert_eq!(inst.num_entries(), 0);
    }

    #[test]
    fn sectors_become_contiguous_blocks() {
        let dir = tempfile::tempdir().unwrap();
        let tickers = [
            ("T1", "Energy"),
            ("T2", "Tech"),
            ("T3", "Health"),
            ("T4", "Energy"),
            ("T5", "Tech"),
            ("T6", "Health"),
        ];
        let mut body = String::from("date,ticker,close\n");
        for (k, d) in ["2023-03-01", "2023-03-02", "2023-03-03", "2023-03-06"]
            .iter()
            .enumerate()
        {
            for (i, (t, _)) in tickers.iter().enumerate() {
                body.push_str(&format!(
                    "{d},{t},{}\n",
                    10.0 + (i * k) as f64 + (k % 2) as f64
                ));
            }
        }
        let p = write(dir.path(), "p.csv", &body);
        let mut sb = String::from("ticker,sector\n");
        for (t, s) in tickers {
            sb.push_str(&format!("{t},{s}\n"));
        }
        let s = write(dir.path(), "s.csv", &sb);
        let data = ingest_prices(&p, &s).unwrap();
        assert_eq!(data.block_labels, vec![0, 0, 1, 1, 2, 2]);
        assert_eq!(data.sector_names, vec!["Energy", "Health", "Tech"]);
        assert_eq!(data.tickers, vec!["T1", "T4", "T3", "T6", "T2", "T5"]);
        assert_eq!(data, ingest_prices(&p, &s).unwrap());
    }

    #[test]
    fn ingestion_errors() {
        let dir = tempfile::tempdir().unwrap();
        let good = "date,ticker,close\n2023-01-02,AAA,1\n2023-01-03,AAA,2\n2023-01-04,AAA,3\n2023-01-02,BBB,1\n2023-01-03,BBB,2\n2023-01-04,BBB,2\n";
        let p = write(dir.path(), "p.csv", good);
        let s = write(dir.path(), "s.csv", "ticker,sector\nAAA,X\n");
        let err = ingest_prices(&p, &s).unwrap_err().to_string();
        assert!(err.contains("BBB"), "{err}");

        let s = write(dir.path(), "s2.csv", "ticker,sector\nAAA,X\nBBB,X\nZZZ,Y\n");
        let err = ingest_prices(&p, &s).unwrap_err().to_string();
        assert!(err.contains("ZZZ") && err.contains("line 4"), "{err}");

        let bad = write(
            dir.path(),
            "bad.csv",
            "date,ticker,close\n2023-01-02,AAA,-1\n",
        );
        let s = write(dir.path(), "s3.csv", "ticker,sector\nAAA,X\n");
        let err = ingest_prices(&bad, &s).unwrap_err().to_string();
        assert!(
            err.contains("line 2") && err.contains("not positive"),
            "{err}"
        );

        let bad = write(
            dir.path(),
            "bad2.csv",
            "date,ticker,close\n02/01/2023,AAA,1\n",
        );
        assert!(ingest_prices(&bad, &s)
            .unwrap_err()
            .to_string()
            .contains("bad date"));
    }

    #[test]
    fn incomplete_dates_are_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let body = "date,ticker,close\n2023-01-02,AAA,1\n2023-01-03,AAA,2\n2023-01-04,AAA,4\n2023-01-05,AAA,8\n\
                    2023-01-02,BBB,1\n2023-01-04,BBB,1\n2023-01-05,BBB,1\n";
        let p = write(dir.path(), "p.csv", body);
        let s = write(dir.path(), "s.csv", "ticker,sector\nAAA,X\nBBB,X\n");
        let table = PriceTable::read(&p, &s).unwrap();
        assert_eq!(table.dates, vec!["2023-01-02", "2023-01-04", "2023-01-05"]);
        assert_eq!(table.prices["AAA"], vec![1.0, 4.0, 8.0]);
    }

    #[test]
    fn maxcut_examples() {
        let g = Graph::new(2, &[(0, 1, 5.0)]).unwrap();
        let h = instance_hamiltonian(&build_maxcut(&g)).unwrap();
        let (x, c) = brute_force(&h).unwrap();
        assert_eq!(-c, 5.0);
        assert_eq!(g.cut_value(&x), 5.0);

        let tri = Graph::new(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let h = instance_hamiltonian(&build_maxcut(&tri)).unwrap();
        assert_eq!(brute_force(&h).unwrap().1, -2.0);

        let empty = Graph::new(4, &[]).unwrap();
        let q = build_maxcut(&empty);
        assert_eq!(q.num_entries(), 0);
        assert!(bits(4).all(|x| empty.cut_value(&x) == 0.0));
    }

    #[test]
    fn graph_validation_and_parsing() {
        assert!(Graph::new(3, &[(1, 1, 1.0)]).is_err());
        assert!(Graph::new(3, &[(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        let g =
            Graph::parse_edge_list("# test\n0 1 2.5\n\n2 1 -1\n", Path::new("g"), None).unwrap();
        assert_eq!(g.num_nodes, 3);
        assert_eq!(g.edges(), &[(0, 1, 2.5), (1, 2, -1.0)]);
        let err = Graph::parse_edge_list("0 1\n", Path::new("g"), None).unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn ising_examples() {
        let h = build_ising(&[(0, 1, -1.0)], &[], 2).unwrap();
        let (x, e) = brute_force(&h).unwrap();
        assert_eq!(e, -1.0);
        assert_eq!(x[0], x[1]);

        let h = build_ising(&[], &[(0, 1.0)], 1).unwrap();
        assert_eq!(brute_force(&h).unwrap(), (crate::Assignment(vec![1]), -1.0));

        let h = build_ising(&[], &[], 0).unwrap();
        assert_eq!(h.num_terms(), 0);
        assert_eq!(h.offset, 0.0);

        assert!(build_ising(&[(0, 1, 1.0), (1, 0, 1.0)], &[], 2).is_err());
        assert!(build_ising(&[(1, 1, 1.0)], &[], 2).is_err());
    }

    #[test]
    fn ising_instance_round_trip() {
        let h = build_ising(&[(0, 1, -0.7), (1, 2, 0.4)], &[(2, 0.9)], 3).unwrap();
        let inst = ising_instance(&h).unwrap();
        let back = instance_hamiltonian(&inst).unwrap();
        for x in bits(3) {
            assert!((h.evaluate_full(&x).unwrap() - back.evaluate_full(&x).unwrap()).abs() < 1e-12);
        }
    }
}
