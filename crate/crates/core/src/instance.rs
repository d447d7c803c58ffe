//! QUBO instances, the weighted stochastic block model generator, and the
//! instance file format.
//!
//! Files are a single JSON document:
//!
//! ```text
//! {"num_vars": 3,
//!  "entries": [[0, 0, 1.5], [0, 2, -0.25]],
//!  "linear": [0.1, 0.0, 0.2],          (optional)
//!  "block_labels": [0, 0, 1],          (optional)
//!  "metadata": {"problem": "portfolio"}}
//! ```
//!
//! `entries` hold the upper triangle of a symmetric matrix, sorted by
//! `(i, j)` with `i <= j` and no duplicates. Floats are written in shortest
//! round-trip form, so `load(save(x)) == x` bit for bit.
//!
//! The objective of an instance is `xᵀVx` when `linear` is absent, and
//! `λ·xᵀVx − (1−λ)·rᵀx` when it is present, with `λ` read from
//! `metadata.lambda`. A constant `metadata.offset`, when present, is added
//! to every cost.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub const META_PROBLEM: &str = "problem";
pub const META_LAMBDA: &str = "lambda";
pub const META_OFFSET: &str = "offset";
pub const META_SEED: &str = "seed";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuboInstance {
    pub num_vars: usize,
    /// Upper-triangle coefficients `V_ij`, `i <= j`. `V_ji = V_ij` is implied.
    pub entries: BTreeMap<(usize, usize), f64>,
    /// Raw linear (return) vector `r`, weighted by `1 − λ`.
    pub linear: Option<Vec<f64>>,
    pub block_labels: Option<Vec<usize>>,
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    LowerTriangle { i: usize, j: usize },
    OutOfRange { i: usize, j: usize },
    ExplicitZero { i: usize, j: usize },
    NonFinite { i: usize, j: usize },
    BlockLabelsLength { expected: usize, found: usize },
    LinearLength { expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LowerTriangle { i, j } => write!(f, "entry ({i}, {j}) has i > j"),
            Violation::OutOfRange { i, j } => write!(f, "entry ({i}, {j}) is out of range"),
            Violation::ExplicitZero { i, j } => write!(f, "entry ({i}, {j}) is an explicit zero"),
            Violation::NonFinite { i, j } => write!(f, "entry ({i}, {j}) is not finite"),
            Violation::BlockLabelsLength { expected, found } => {
                write!(f, "block_labels has {found} labels, expected {expected}")
            }
            Violation::LinearLength { expected, found } => {
                write!(f, "linear has {found} values, expected {expected}")
            }
        }
    }
}

impl QuboInstance {
    pub fn new(num_vars: usize) -> Self {
        QuboInstance {
            num_vars,
            ..Default::default()
        }
    }

    /// Builds an instance from a dense symmetric matrix, reading the upper triangle.
    pub fn from_dense(matrix: &[Vec<f64>]) -> Result<Self> {
        let n = matrix.len();
        let mut inst = QuboInstance::new(n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {i} has {} columns, expected {n}",
                    row.len()
                )));
            }
            for j in i..n {
                inst.set(i, j, row[j]);
            }
        }
        Ok(inst)
    }

    /// Sets `V_ij = V_ji = value`. Indices are canonicalized; zero removes the entry.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let key = (i.min(j), i.max(j));
        if value == 0.0 {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
    }

    /// Adds `delta` to `V_ij`, dropping the entry if it cancels to zero.
    pub fn add(&mut self, i: usize, j: usize, delta: f64) {
        let key = (i.min(j), i.max(j));
        let value = self.entries.get(&key).copied().unwrap_or(0.0) + delta;
        self.set(key.0, key.1, value);
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// `xᵀVx` for a bit vector.
    pub fn quadratic_form(&self, bits: &[u8]) -> f64 {
        self.entries
            .iter()
            .map(|(&(i, j), &v)| {
                let xi = f64::from(bits[i]);
                let xj = f64::from(bits[j]);
                if i == j {
                    v * xi * xj
                } else {
                    2.0 * v * xi * xj
                }
            })
            .sum()
    }

    /// Number of distinct block labels, or 1 if unlabelled.
    pub fn num_blocks(&self) -> usize {
        match &self.block_labels {
            Some(labels) if !labels.is_empty() => labels.iter().collect::<BTreeSet<_>>().len(),
            _ => 1,
        }
    }

    /// Observed off-diagonal edge densities `(intra, inter)` over the block
    /// labels; `None` without at least two blocks.
    pub fn block_densities(&self) -> Option<(f64, f64)> {
        let labels = self.block_labels.as_ref()?;
        if self.num_blocks() < 2 {
            return None;
        }
        let mut sizes: BTreeMap<usize, u64> = BTreeMap::new();
        for &l in labels {
            *sizes.entry(l).or_default() += 1;
        }
        let total = labels.len() as u64;
        let intra_pairs: u64 = sizes.values().map(|&s| s * s.saturating_sub(1) / 2).sum();
        let inter_pairs = total * (total - 1) / 2 - intra_pairs;
        let (mut intra, mut inter) = (0u64, 0u64);
        for &(i, j) in self.entries.keys() {
            if i == j {
                continue;
            }
            if labels[i] == labels[j] {
                intra += 1;
            } else {
                inter += 1;
            }
        }
        if intra_pairs == 0 || inter_pairs == 0 {
            return None;
        }
        Some((
            intra as f64 / intra_pairs as f64,
            inter as f64 / inter_pairs as f64,
        ))
    }

    fn meta_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.metadata.get(key) {
            None => Ok(None),
            Some(s) => s.parse::<f64>().map(Some).map_err(|_| {
                Error::InvalidArgument(format!("metadata.{key} = {s:?} is not a number"))
            }),
        }
    }

    /// Constant added to every cost (`metadata.offset`, default 0).
    pub fn offset(&self) -> Result<f64> {
        Ok(self.meta_f64(META_OFFSET)?.unwrap_or(0.0))
    }

    /// Risk weight applied when a linear vector is present.
    pub fn risk_weight(&self) -> Result<f64> {
        match (&self.linear, self.meta_f64(META_LAMBDA)?) {
            (None, _) => Ok(1.0),
            (Some(_), Some(l)) if (0.0..=1.0).contains(&l) => Ok(l),
            (Some(_), Some(l)) => Err(Error::InvalidArgument(format!(
                "metadata.lambda = {l} is outside [0, 1]"
            ))),
            (Some(_), None) => Err(Error::InvalidArgument(
                "instance has a linear vector but no metadata.lambda".into(),
            )),
        }
    }

    /// Full objective of the instance for a bit vector.
    pub fn objective(&self, bits: &[u8]) -> Result<f64> {
        let lambda = self.risk_weight()?;
        let mut cost = lambda * self.quadratic_form(bits);
        if let Some(r) = &self.linear {
            let ret: f64 = r.iter().zip(bits).map(|(r, &b)| r * f64::from(b)).sum();
            cost -= (1.0 - lambda) * ret;
        }
        Ok(cost + self.offset()?)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (&(i, j), &v) in &self.entries {
            if i > j {
                out.push(Violation::LowerTriangle { i, j });
            }
            if i >= self.num_vars || j >= self.num_vars {
                out.push(Violation::OutOfRange { i, j });
            }
            if v == 0.0 {
                out.push(Violation::ExplicitZero { i, j });
            } else if !v.is_finite() {
                out.push(Violation::NonFinite { i, j });
            }
        }
        if let Some(labels) = &self.block_labels {
            if labels.len() != self.num_vars {
                out.push(Violation::BlockLabelsLength {
                    expected: self.num_vars,
                    found: labels.len(),
                });
            }
        }
        if let Some(linear) = &self.linear {
            if linear.len() != self.num_vars {
                out.push(Violation::LinearLength {
                    expected: self.num_vars,
                    found: linear.len(),
                });
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let num = |v: f64| serde_json::to_string(&v).expect("finite float");
        let mut s = String::new();
        s.push_str(&format!(
            "{{\"num_vars\": {},\n \"entries\": [",
            self.num_vars
        ));
        for (k, (&(i, j), &v)) in self.entries.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            s.push_str(&format!("\n  [{i}, {j}, {}]", num(v)));
        }
        s.push_str("],\n");
        if let Some(linear) = &self.linear {
            let vals: Vec<String> = linear.iter().map(|&v| num(v)).collect();
            s.push_str(&format!(" \"linear\": [{}],\n", vals.join(", ")));
        }
        if let Some(labels) = &self.block_labels {
            let vals: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
            s.push_str(&format!(" \"block_labels\": [{}],\n", vals.join(", ")));
        }
        s.push_str(&format!(
            " \"metadata\": {}}}\n",
            serde_json::to_string(&self.metadata).expect("string map")
        ));
        s
    }

    /// Parses the JSON document. `origin` only labels error messages.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| {
            Error::parse(
                origin,
                format!("line {}, column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        let mut inst = QuboInstance::new(file.num_vars);
        let mut prev: Option<(usize, usize)> = None;
        for (k, &(i, j, v)) in file.entries.iter().enumerate() {
            let loc = format!("entries[{k}]");
            if i > j {
                return Err(Error::parse(origin, loc, format!("({i}, {j}) has i > j")));
            }
            if j >= file.num_vars {
                return Err(Error::parse(
                    origin,
                    loc,
                    format!("({i}, {j}) out of range for {} variables", file.num_vars),
                ));
            }
            if let Some(p) = prev {
                if p == (i, j) {
                    return Err(Error::parse(
                        origin,
                        loc,
                        format!("duplicate entry ({i}, {j})"),
                    ));
                }
                if p > (i, j) {
                    return Err(Error::parse(
                        origin,
                        loc,
                        format!("entry ({i}, {j}) is out of (i, j) order"),
                    ));
                }
            }
            if v == 0.0 {
                return Err(Error::parse(origin, loc, "explicit zero entry"));
            }
            prev = Some((i, j));
            inst.entries.insert((i, j), v);
        }
        inst.linear = file.linear;
        inst.block_labels = file.block_labels;
        inst.metadata = file.metadata;
        if let Some(v) = inst.validate().into_iter().next() {
            return Err(Error::parse(origin, "document", v.to_string()));
        }
        Ok(inst)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    num_vars: usize,
    entries: Vec<(usize, usize, f64)>,
    #[serde(default)]
    linear: Option<Vec<f64>>,
    #[serde(default)]
    block_labels: Option<Vec<usize>>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

/// Weight distribution attached to a pair of blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightDistribution {
    /// `std` is the standard deviation.
    Normal {
        mean: f64,
        std: f64,
    },
    Exponential {
        rate: f64,
    },
    Uniform {
        low: f64,
        high: f64,
    },
    Constant {
        value: f64,
    },
}

impl WeightDistribution {
    pub fn check(&self) -> Result<()> {
        let ok = match *self {
            WeightDistribution::Normal { mean, std } => {
                mean.is_finite() && std.is_finite() && std >= 0.0
            }
            WeightDistribution::Exponential { rate } => rate.is_finite() && rate > 0.0,
            WeightDistribution::Uniform { low, high } => {
                low.is_finite() && high.is_finite() && low <= high
            }
            WeightDistribution::Constant { value } => value.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!(
                "bad distribution parameters: {self}"
            )))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            WeightDistribution::Normal { mean, .. } => mean,
            WeightDistribution::Exponential { rate } => 1.0 / rate,
            WeightDistribution::Uniform { low, high } => 0.5 * (low + high),
            WeightDistribution::Constant { value } => value,
        }
    }

    pub fn std_dev(&self) -> f64 {
        match *self {
            WeightDistribution::Normal { std, .. } => std,
            WeightDistribution::Exponential { rate } => 1.0 / rate,
            WeightDistribution::Uniform { low, high } => (high - low) / 12f64.sqrt(),
            WeightDistribution::Constant { .. } => 0.0,
        }
    }

    /// Draws one weight. Parameters must already have passed [`check`](Self::check).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            WeightDistribution::Normal { mean, std } => {
                Normal::new(mean, std).expect("checked").sample(rng)
            }
            WeightDistribution::Exponential { rate } => {
                Exp::new(rate).expect("checked").sample(rng)
            }
            WeightDistribution::Uniform { low, high } => {
                if low == high {
                    low
                } else {
                    rng.random_range(low..high)
                }
            }
            WeightDistribution::Constant { value } => value,
        }
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightDistribution::Normal { mean, std } => write!(f, "norm:{mean},{std}"),
            WeightDistribution::Exponential { rate } => write!(f, "exp:{rate}"),
            WeightDistribution::Uniform { low, high } => write!(f, "unif:{low},{high}"),
            WeightDistribution::Constant { value } => write!(f, "const:{value}"),
        }
    }
}

/// Parses `norm:MEAN,STD`, `exp:RATE`, `unif:LOW,HIGH` and `const:VALUE`.
impl FromStr for WeightDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse distribution {s:?}"));
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let args: Vec<f64> = args
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let dist = match (kind.trim(), args.as_slice()) {
            ("norm" | "normal", &[mean, std]) => WeightDistribution::Normal { mean, std },
            ("exp" | "exponential", &[rate]) => WeightDistribution::Exponential { rate },
            ("unif" | "uniform", &[low, high]) => WeightDistribution::Uniform { low, high },
            ("const" | "constant", &[value]) => WeightDistribution::Constant { value },
            _ => return Err(bad()),
        };
        dist.check()?;
        Ok(dist)
    }
}

/// Weighted stochastic block model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WsbmSpec {
    pub block_sizes: Vec<usize>,
    /// Edge probability between blocks, `N × N`, symmetric.
    pub connectivity: Vec<Vec<f64>>,
    /// Weight distribution between blocks, `N × N`, symmetric.
    pub weights: Vec<Vec<WeightDistribution>>,
}

impl WsbmSpec {
    /// Two-level model: `p_in`/`w_in` inside blocks, `p_out`/`w_out` across.
    pub fn planted(
        block_sizes: Vec<usize>,
        p_in: f64,
        p_out: f64,
        w_in: WeightDistribution,
        w_out: WeightDistribution,
    ) -> Self {
        let n = block_sizes.len();
        let connectivity = (0..n)
            .map(|a| (0..n).map(|b| if a == b { p_in } else { p_out }).collect())
            .collect();
        let weights = (0..n)
            .map(|a| (0..n).map(|b| if a == b { w_in } else { w_out }).collect())
            .collect();
        WsbmSpec {
            block_sizes,
            connectivity,
            weights,
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn num_vars(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.block_sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &size)| std::iter::repeat_n(b, size))
            .collect()
    }

    pub fn check(&self) -> Result<()> {
        let n = self.num_blocks();
        if n == 0 {
            return Err(Error::InvalidSpec("no blocks".into()));
        }
        if self.block_sizes.contains(&0) {
            return Err(Error::InvalidSpec("block sizes must be positive".into()));
        }
        if self.connectivity.len() != n || self.connectivity.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSpec(format!("connectivity must be {n}×{n}")));
        }
        if self.weights.len() != n || self.weights.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSpec(format!("weights must be {n}×{n}")));
        }
        for a in 0..n {
            for b in 0..n {
                let p = self.connectivity[a][b];
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidSpec(format!(
                        "connectivity[{a}][{b}] = {p} is not a probability"
                    )));
                }
                if p != self.connectivity[b][a] {
                    return Err(Error::InvalidSpec(format!(
                        "connectivity is not symmetric at ({a}, {b})"
                    )));
                }
                if self.weights[a][b] != self.weights[b][a] {
                    return Err(Error::InvalidSpec(format!(
                        "weights are not symmetric at ({a}, {b})"
                    )));
                }
                self.weights[a][b].check()?;
            }
        }
        Ok(())
    }

    /// Expected number of stored entries, ignoring zero-weight suppression.
    pub fn expected_entries(&self) -> f64 {
        let n = self.num_blocks();
        let mut total = self.num_vars() as f64;
        for a in 0..n {
            let na = self.block_sizes[a] as f64;
            total += na * (na - 1.0) / 2.0 * self.connectivity[a][a];
            for b in a + 1..n {
                total += na * self.block_sizes[b] as f64 * self.connectivity[a][b];
            }
        }
        total
    }
}

/// Samples a symmetric coefficient matrix from the block model.
///
/// Pairs are visited in row-major order (`i`, then `j >= i`). Off-diagonal
/// pairs always consume one uniform draw for the edge test, followed by a
/// weight draw if the edge exists; diagonal entries always draw a weight
/// from the block's own distribution.
pub fn generate_wsbm(spec: &WsbmSpec, seed: u64) -> Result<QuboInstance> {
    spec.check()?;
    let labels = spec.labels();
    let n = labels.len();
    let mut rng = rng::stream(seed, "wsbm");
    let mut inst = QuboInstance::new(n);
    for i in 0..n {
        let a = labels[i];
        for j in i..n {
            let b = labels[j];
            let weight = if i == j {
                spec.weights[a][a].sample(&mut rng)
            } else {
                let u: f64 = rng.random();
                if u < spec.connectivity[a][b] {
                    spec.weights[a][b].sample(&mut rng)
                } else {
                    0.0
                }
            };
            if weight != 0.0 {
                inst.entries.insert((i, j), weight);
            }
        }
    }
    inst.block_labels = Some(labels);
    inst.metadata.insert("generator".into(), "wsbm".into());
    inst.metadata.insert(META_SEED.into(), seed.to_string());
    Ok(inst)
}
