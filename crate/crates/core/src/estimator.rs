//! Amplitude-based shot allocation.
//!
//! Instead of summing all `n_w` terms of a Hamiltonian, `n_s` terms are
//! drawn with probability `p_m = |a_m|² / Σ|a_m|²` and only those are
//! evaluated. Two estimators are offered:
//!
//! * [`EstimatorMode::PaperLiteral`]: `n_s` distinct terms, drawn by
//!   successive renormalized categorical draws, summed as-is. This is a
//!   partial sum and is biased toward the offset, but with `n_s = n_w` it
//!   is exactly the full cost.
//! * [`EstimatorMode::Unbiased`]: `n_s` i.i.d. draws, each weighted by
//!   `1/p_m`, averaged. Its expectation is the full cost.
//!
//! The offset is always added exactly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::IsingHamiltonian;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorMode {
    #[default]
    PaperLiteral,
    Unbiased,
}

impl std::fmt::Display for EstimatorMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EstimatorMode::PaperLiteral => "paper-literal",
            EstimatorMode::Unbiased => "unbiased",
        })
    }
}

impl std::str::FromStr for EstimatorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-literal" | "literal" => Ok(EstimatorMode::PaperLiteral),
            "unbiased" => Ok(EstimatorMode::Unbiased),
            _ => Err(Error::InvalidArgument(format!(
                "unknown estimator mode {s:?}"
            ))),
        }
    }
}

/// Sampling distribution over the terms of one Hamiltonian.
#[derive(Debug, Clone)]
pub struct ShotAllocator<'h> {
    hamiltonian: &'h IsingHamiltonian,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
    /// Complete binary sum tree over the unnormalized weights, leaves at `[leaves..]`.
    tree: Vec<f64>,
    leaves: usize,
    support_size: usize,
}

impl<'h> ShotAllocator<'h> {
    /// `p_m ∝ |a_m|²`.
    pub fn new(h: &'h IsingHamiltonian) -> Result<Self> {
        let weights: Vec<f64> = h
            .terms()
            .iter()
            .map(|t| t.coefficient * t.coefficient)
            .collect();
        Self::with_weights(h, weights)
    }

    /// `p_m = 1/n_w` over the nonzero terms; the reference proposal for variance comparisons.
    pub fn uniform(h: &'h IsingHamiltonian) -> Result<Self> {
        let weights = h
            .terms()
            .iter()
            .map(|t| if t.coefficient != 0.0 { 1.0 } else { 0.0 })
            .collect();
        Self::with_weights(h, weights)
    }

    fn with_weights(h: &'h IsingHamiltonian, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || total <= 0.0 || !total.is_finite() {
            return Err(Error::EmptyHamiltonian);
        }
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let cumulative = weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        let leaves = weights.len().next_power_of_two();
        let mut tree = vec![0.0; 2 * leaves];
        tree[leaves..leaves + weights.len()].copy_from_slice(&weights);
        for node in (1..leaves).rev() {
            tree[node] = tree[2 * node] + tree[2 * node + 1];
        }
        let support_size = weights.iter().filter(|&&w| w > 0.0).count();
        Ok(ShotAllocator {
            hamiltonian: h,
            probs,
            cumulative,
            tree,
            leaves,
            support_size,
        })
    }

    pub fn hamiltonian(&self) -> &'h IsingHamiltonian {
        self.hamiltonian
    }

    pub fn term_probs(&self) -> &[f64] {
        &self.probs
    }

    /// Number of terms with nonzero probability.
    pub fn support_size(&self) -> usize {
        self.support_size
    }

    fn draw_iid<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("nonempty");
        let u = rng.random::<f64>() * total;
        let k = self.cumulative.partition_point(|&c| c <= u);
        if k < self.cumulative.len() {
            k
        } else {
            // u rounded up to the total; take the last term with positive mass.
            self.probs
                .iter()
                .rposition(|&p| p > 0.0)
                .expect("positive mass")
        }
    }

    fn draw_without_replacement<R: Rng + ?Sized>(&self, n_s: usize, rng: &mut R) -> Vec<usize> {
        let mut tree = self.tree.clone();
        let mut out = Vec::with_capacity(n_s);
        for _ in 0..n_s {
            let mut target = rng.random::<f64>() * tree[1];
            let mut node = 1;
            while node < self.leaves {
                let (left, right) = (tree[2 * node], tree[2 * node + 1]);
                if right <= 0.0 || (left > 0.0 && target < left) {
                    node *= 2;
                } else {
                    target -= left;
                    node = 2 * node + 1;
                }
            }
            out.push(node - self.leaves);
            tree[node] = 0.0;
            let mut parent = node / 2;
            while parent >= 1 {
                tree[parent] = tree[2 * parent] + tree[2 * parent + 1];
                parent /= 2;
            }
        }
        out
    }

    /// Draws term indices for one cost estimate.
    ///
    /// `PaperLiteral` returns `n_s` distinct indices in ascending order;
    /// `Unbiased` returns `n_s` i.i.d. indices in draw order.
    pub fn sample_terms<R: Rng + ?Sized>(
        &self,
        n_s: usize,
        mode: EstimatorMode,
        rng: &mut R,
    ) -> Result<Vec<usize>> {
        if n_s == 0 {
            return Err(Error::InvalidArgument("n_s must be at least 1".into()));
        }
        match mode {
            EstimatorMode::PaperLiteral => {
                if n_s > self.support_size {
                    return Err(Error::TooManyShots {
                        requested: n_s,
                        available: self.support_size,
                    });
                }
                let mut idx = self.draw_without_replacement(n_s, rng);
                idx.sort_unstable();
                Ok(idx)
            }
            EstimatorMode::Unbiased => Ok((0..n_s).map(|_| self.draw_iid(rng)).collect()),
        }
    }

    /// Shot-subsampled cost `Cost_s(x)`.
    pub fn cost_s<R: Rng + ?Sized>(
        &self,
        x: &[u8],
        n_s: usize,
        mode: EstimatorMode,
        rng: &mut R,
    ) -> Result<f64> {
        let h = self.hamiltonian;
        if x.len() != h.num_qubits() {
            return Err(Error::Dimension(format!(
                "assignment has {} bits, hamiltonian has {} qubits",
                x.len(),
                h.num_qubits()
            )));
        }
        if !h.is_all_z() {
            return Err(Error::UnsupportedTerm(
                "hamiltonian has non-Z letters".into(),
            ));
        }
        let idx = self.sample_terms(n_s, mode, rng)?;
        let terms = h.terms();
        let value = match mode {
            // Summed in ascending term order so that n_s = n_w reproduces
            // the full evaluation bit for bit.
            EstimatorMode::PaperLiteral => {
                let sum: f64 = idx
                    .iter()
                    .map(|&m| terms[m].coefficient * terms[m].sign(x))
                    .sum();
                h.offset + sum
            }
            EstimatorMode::Unbiased => {
                let sum: f64 = idx
                    .iter()
                    .map(|&m| terms[m].coefficient * terms[m].sign(x) / self.probs[m])
                    .sum();
                h.offset + sum / n_s as f64
            }
        };
        Ok(value)
    }
}

/// `ShotAllocator::new`, named after the operation.
pub fn build_allocator(h: &IsingHamiltonian) -> Result<ShotAllocator<'_>> {
    ShotAllocator::new(h)
}

/// Above this `p/q` ratio the block structure is treated as uniform and no
/// reduction is applied.
pub const NEAR_UNIFORM_RATIO: f64 = 0.8;

/// `⌈n_w / (1 + (N−1)·p/q)⌉` for `N` equal blocks with intra-block edge
/// probability `q` and inter-block probability `p`.
pub fn shot_count_block(n_w: usize, num_blocks: usize, p: f64, q: f64) -> Result<usize> {
    if num_blocks == 0 {
        return Err(Error::InvalidArgument(
            "number of blocks must be at least 1".into(),
        ));
    }
    if !(p > 0.0 && q > 0.0 && p.is_finite() && q.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "edge probabilities must be positive, got p = {p}, q = {q}"
        )));
    }
    if p > q {
        return Err(Error::InvalidArgument(format!(
            "inter-block probability p = {p} exceeds intra-block q = {q}"
        )));
    }
    if num_blocks == 1 {
        return Ok(n_w);
    }
    let ratio = p / q;
    if ratio >= NEAR_UNIFORM_RATIO {
        log::warn!(
            "p/q = {ratio:.3}: blocks are nearly uniform, using all {n_w} terms (no speedup)"
        );
        return Ok(n_w);
    }
    let shots = (n_w as f64 / (1.0 + (num_blocks as f64 - 1.0) * ratio)).ceil() as usize;
    Ok(shots.clamp(1, n_w.max(1)))
}

/// `⌈n_w / N⌉`.
pub fn shot_count_simple(n_w: usize, num_blocks: usize) -> usize {
    let n = num_blocks.max(1);
    n_w.div_ceil(n).max(1)
}
