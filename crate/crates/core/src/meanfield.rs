//! Fully factorized softmax model over binary variables.
//!
//! Variable `i` has logits `α_i = [α_i0, α_i1]` and
//! `p(x_i = j) = e^{α_ij} / (e^{α_i0} + e^{α_i1})`. The expected cost
//! `E_{x∼P}[Cost(x)]` is minimized with the score-function estimator
//! `∇_α E[Cost] ≈ (1/n_b) Σ_k ∇_α ln P(x^k) · Cost(x^k)`, where
//! `∂ ln P(x) / ∂α_ij = 1[j = x_i] − p(x_i = j)`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Assignment;

/// One `[∂/∂α_i0, ∂/∂α_i1]` row per variable.
pub type Gradient = Vec<[f64; 2]>;

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldModel {
    alpha: Vec<[f64; 2]>,
}

#[inline]
fn softmax2(row: [f64; 2]) -> [f64; 2] {
    let m = row[0].max(row[1]);
    let e0 = (row[0] - m).exp();
    let e1 = (row[1] - m).exp();
    let z = e0 + e1;
    [e0 / z, e1 / z]
}

impl MeanFieldModel {
    /// All-zero logits: every variable uniform.
    pub fn uniform(num_vars: usize) -> Self {
        MeanFieldModel {
            alpha: vec![[0.0; 2]; num_vars],
        }
    }

    /// Zero logits plus Gaussian jitter of the given standard deviation.
    pub fn jittered<R: Rng + ?Sized>(num_vars: usize, std: f64, rng: &mut R) -> Result<Self> {
        let normal = Normal::new(0.0, std)
            .map_err(|_| Error::InvalidArgument(format!("bad jitter std {std}")))?;
        let alpha = (0..num_vars)
            .map(|_| [normal.sample(rng), normal.sample(rng)])
            .collect();
        Ok(MeanFieldModel { alpha })
    }

    pub fn from_logits(alpha: Vec<[f64; 2]>) -> Result<Self> {
        if alpha.iter().flatten().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("logits".into()));
        }
        Ok(MeanFieldModel { alpha })
    }

    pub fn num_vars(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[[f64; 2]] {
        &self.alpha
    }

    /// Row-wise softmax with max subtraction.
    pub fn probs(&self) -> Vec<[f64; 2]> {
        self.alpha.iter().map(|&r| softmax2(r)).collect()
    }

    /// `ln P(x) = Σ_i ln p(x_i)`.
    pub fn log_prob(&self, x: &[u8]) -> f64 {
        self.alpha
            .iter()
            .zip(x)
            .map(|(r, &b)| {
                let m = r[0].max(r[1]);
                let lse = m + ((r[0] - m).exp() + (r[1] - m).exp()).ln();
                r[usize::from(b)] - lse
            })
            .sum()
    }

    /// Draws one bitstring, one uniform per variable in index order.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Assignment {
        Assignment(
            self.alpha
                .iter()
                .map(|&r| {
                    let p1 = softmax2(r)[1];
                    u8::from(rng.random::<f64>() < p1)
                })
                .collect(),
        )
    }

    pub fn sample_batch<R: Rng + ?Sized>(&self, n_b: usize, rng: &mut R) -> Result<SampleBatch> {
        if n_b == 0 {
            return Err(Error::InvalidArgument("n_b must be at least 1".into()));
        }
        Ok(SampleBatch {
            samples: (0..n_b).map(|_| self.sample(rng)).collect(),
            costs: None,
        })
    }

    /// `∂ ln P(x) / ∂α_ij = 1[j = x_i] − p(x_i = j)`.
    pub fn log_prob_grad(&self, x: &[u8]) -> Gradient {
        self.alpha
            .iter()
            .zip(x)
            .map(|(&r, &b)| {
                let p = softmax2(r);
                let mut g = [-p[0], -p[1]];
                g[usize::from(b)] += 1.0;
                g
            })
            .collect()
    }

    /// Per-variable argmax; ties go to bit 0.
    pub fn mode_assignment(&self) -> Assignment {
        Assignment(self.alpha.iter().map(|r| u8::from(r[1] > r[0])).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub samples: Vec<Assignment>,
    /// Filled in once the samples are scored.
    pub costs: Option<Vec<f64>>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn with_costs(mut self, costs: Vec<f64>) -> Result<Self> {
        if costs.len() != self.samples.len() {
            return Err(Error::Dimension(format!(
                "{} costs for {} samples",
                costs.len(),
                self.samples.len()
            )));
        }
        self.costs = Some(costs);
        Ok(self)
    }
}

/// Batch mean cost and the Monte-Carlo score-function gradient.
///
/// With `baseline` set, the batch mean cost is subtracted from every cost
/// before weighting (a control variate; off by default in the solver).
pub fn objective_and_grad(
    model: &MeanFieldModel,
    batch: &SampleBatch,
    baseline: bool,
) -> Result<(f64, Gradient)> {
    let costs = batch
        .costs
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("batch costs are not populated".into()))?;
    if batch.is_empty() {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    let n_b = batch.len() as f64;
    let objective = costs.iter().sum::<f64>() / n_b;
    let shift = if baseline { objective } else { 0.0 };
    let probs = model.probs();
    let mut grad = vec![[0.0; 2]; model.num_vars()];
    for (x, &c) in batch.samples.iter().zip(costs) {
        let w = (c - shift) / n_b;
        for ((g, p), &b) in grad.iter_mut().zip(&probs).zip(x.iter()) {
            let b = usize::from(b);
            g[b] += w * (1.0 - p[b]);
            g[1 - b] -= w * p[1 - b];
        }
    }
    Ok((objective, grad))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    m: Gradient,
    v: Gradient,
    t: u64,
}

impl AdamState {
    pub fn new(num_vars: usize, config: AdamConfig) -> Self {
        AdamState {
            config,
            m: vec![[0.0; 2]; num_vars],
            v: vec![[0.0; 2]; num_vars],
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }
}

/// One bias-corrected ADAM descent step on the logits.
pub fn adam_step(
    model: &mut MeanFieldModel,
    state: &mut AdamState,
    grad: &[[f64; 2]],
) -> Result<()> {
    if grad.len() != model.alpha.len() || state.m.len() != model.alpha.len() {
        return Err(Error::Dimension(format!(
            "gradient has {} rows, model has {}",
            grad.len(),
            model.alpha.len()
        )));
    }
    if grad.iter().flatten().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("gradient".into()));
    }
    let AdamConfig {
        learning_rate,
        beta1,
        beta2,
        epsilon,
    } = state.config;
    state.t += 1;
    let t = state.t as i32;
    let c1 = 1.0 - beta1.powi(t);
    let c2 = 1.0 - beta2.powi(t);
    for (((a, m), v), g) in model
        .alpha
        .iter_mut()
        .zip(state.m.iter_mut())
        .zip(state.v.iter_mut())
        .zip(grad)
    {
        for j in 0..2 {
            m[j] = beta1 * m[j] + (1.0 - beta1) * g[j];
            v[j] = beta2 * v[j] + (1.0 - beta2) * g[j] * g[j];
            let m_hat = m[j] / c1;
            let v_hat = v[j] / c2;
            a[j] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn softmax_examples() {
        let m =
            MeanFieldModel::from_logits(vec![[0.0, 0.0], [3f64.ln(), 0.0], [1000.0, 0.0]]).unwrap();
        let p = m.probs();
        assert_eq!(p[0], [0.5, 0.5]);
        assert!((p[1][0] - 0.75).abs() < 1e-15 && (p[1][1] - 0.25).abs() < 1e-15);
        assert_eq!(p[2][0], 1.0);
        assert!(p[2][1] >= 0.0 && p[2][1] < 1e-300);
    }

    #[test]
    fn deterministic_rows_sample_the_mode() {
        let m =
            MeanFieldModel::from_logits(vec![[40.0, -40.0], [-40.0, 40.0], [40.0, -40.0]]).unwrap();
        let mut r = rng::stream(1, "t");
        let batch = m.sample_batch(200, &mut r).unwrap();
        assert!(batch.samples.iter().all(|x| x.0 == vec![0, 1, 0]));
        assert_eq!(m.sample_batch(1, &mut r).unwrap().len(), 1);
        assert!(m.sample_batch(0, &mut r).is_err());
    }

    #[test]
    fn uniform_rows_sample_fair_bits() {
        let m = MeanFieldModel::uniform(3);
        let mut r = rng::stream(2, "t");
        let n = 100_000;
        let batch = m.sample_batch(n, &mut r).unwrap();
        let sd = (n as f64 * 0.25).sqrt();
        for i in 0..3 {
            let ones = batch.samples.iter().filter(|x| x[i] == 1).count() as f64;
            assert!((ones - n as f64 / 2.0).abs() < 4.0 * sd);
        }
    }

    #[test]
    fn log_prob_grad_examples() {
        let m = MeanFieldModel::uniform(1);
        assert_eq!(m.log_prob_grad(&[1]), vec![[-0.5, 0.5]]);
        let m = MeanFieldModel::from_logits(vec![[-30.0, 30.0]]).unwrap();
        let g = m.log_prob_grad(&[1]);
        assert!(g[0][0].abs() < 1e-20 && g[0][1].abs() < 1e-20);
    }

    #[test]
    fn log_prob_grad_matches_finite_differences() {
        let mut r = rng::stream(3, "t");
        let m = MeanFieldModel::jittered(6, 1.5, &mut r).unwrap();
        let x = m.sample(&mut r);
        let g = m.log_prob_grad(&x);
        let h = 1e-5;
        for i in 0..6 {
            for j in 0..2 {
                let mut plus = m.alpha.clone();
                let mut minus = m.alpha.clone();
                plus[i][j] += h;
                minus[i][j] -= h;
                let fd = (MeanFieldModel { alpha: plus }.log_prob(&x)
                    - MeanFieldModel { alpha: minus }.log_prob(&x))
                    / (2.0 * h);
                assert!(
                    (fd - g[i][j]).abs() < 1e-6,
                    "({i},{j}) fd {fd} vs {}",
                    g[i][j]
                );
            }
        }
    }

    #[test]
    fn objective_grad_edge_cases() {
        let m = MeanFieldModel::from_logits(vec![[0.3, -0.2], [1.0, 0.0]]).unwrap();
        let batch = SampleBatch {
            samples: vec![Assignment(vec![0, 1]), Assignment(vec![1, 1])],
            costs: None,
        };
        assert!(objective_and_grad(&m, &batch, false).is_err());

        let zero = batch.clone().with_costs(vec![0.0, 0.0]).unwrap();
        let (obj, g) = objective_and_grad(&m, &zero, false).unwrap();
        assert_eq!(obj, 0.0);
        assert!(g.iter().flatten().all(|&v| v == 0.0));

        let x = Assignment(vec![1, 0]);
        let one = SampleBatch {
            samples: vec![x.clone()],
            costs: Some(vec![2.5]),
        };
        let (obj, g) = objective_and_grad(&m, &one, false).unwrap();
        assert_eq!(obj, 2.5);
        let expect = m.log_prob_grad(&x);
        for (a, b) in g.iter().zip(&expect) {
            assert!((a[0] - 2.5 * b[0]).abs() < 1e-15 && (a[1] - 2.5 * b[1]).abs() < 1e-15);
        }

        let empty = SampleBatch {
            samples: vec![],
            costs: Some(vec![]),
        };
        assert!(objective_and_grad(&m, &empty, false).is_err());
    }

    #[test]
    fn adam_zero_gradient_is_a_no_op() {
        let mut m = MeanFieldModel::from_logits(vec![[0.1, -0.4]; 3]).unwrap();
        let before = m.clone();
        let mut s = AdamState::new(3, AdamConfig::default());
        adam_step(&mut m, &mut s, &[[0.0; 2]; 3]).unwrap();
        assert_eq!(m, before);
        assert_eq!(s.steps(), 1);
    }

    #[test]
    fn adam_first_step_moves_by_learning_rate() {
        let cfg = AdamConfig::default();
        let mut m = MeanFieldModel::uniform(2);
        let mut s = AdamState::new(2, cfg);
        let g = vec![[0.3, -2.0], [5e-3, 1.0]];
        adam_step(&mut m, &mut s, &g).unwrap();
        for (a, gr) in m.alpha().iter().zip(&g) {
            for j in 0..2 {
                let expect = -cfg.learning_rate * gr[j] / (gr[j].abs() + cfg.epsilon);
                assert!((a[j] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn adam_steps_are_bounded() {
        let cfg = AdamConfig::default();
        let bound = cfg.learning_rate / (1.0 - cfg.beta1);
        let mut r = rng::stream(4, "t");
        let mut m = MeanFieldModel::uniform(4);
        let mut s = AdamState::new(4, cfg);
        for _ in 0..500 {
            let g: Gradient = (0..4)
                .map(|_| [r.random_range(-10.0..10.0), r.random_range(-1e-3..1e-3)])
                .collect();
            let before = m.clone();
            adam_step(&mut m, &mut s, &g).unwrap();
            for (a, b) in m.alpha().iter().zip(before.alpha()) {
                assert!((a[0] - b[0]).abs() <= bound && (a[1] - b[1]).abs() <= bound);
            }
        }
    }

    #[test]
    fn adam_rejects_non_finite() {
        let mut m = MeanFieldModel::uniform(1);
        let mut s = AdamState::new(1, AdamConfig::default());
        assert!(matches!(
            adam_step(&mut m, &mut s, &[[f64::NAN, 0.0]]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn mode_readout() {
        let m = MeanFieldModel::from_logits(vec![[2.0, 1.0], [1.0, 2.0], [0.5, 0.5]]).unwrap();
        assert_eq!(m.mode_assignment().0, vec![0, 1, 0]);
    }
}
