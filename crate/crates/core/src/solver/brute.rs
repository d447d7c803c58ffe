use crate::error::{Error, Result};
use crate::hamiltonian::{Assignment, IsingHamiltonian};

use super::{Algorithm, EpochRecord, QueryLedger, RunTrace, SolverConfig};

pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Exact global minimum by Gray-code enumeration.
///
/// Costs are updated incrementally; any candidate within rounding distance
/// of the incumbent is re-scored exactly, and exact ties resolve to the
/// lexicographically smallest assignment (bit 0 first).
pub fn brute_force(h: &IsingHamiltonian) -> Result<(Assignment, f64)> {
    let n = h.num_qubits();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            num_vars: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if !h.is_all_z() {
        return Err(Error::UnsupportedTerm(
            "brute force needs an all-Z hamiltonian".into(),
        ));
    }
    let incidence = h.incidence();
    let terms = h.terms();
    let scale: f64 = h.offset.abs() + terms.iter().map(|t| t.coefficient.abs()).sum::<f64>();
    let tol = 1e-9 * (1.0 + scale);

    let mut x = vec![0u8; n];
    let mut cost = h.energy(&x);
    let mut best_x = x.clone();
    let mut best_exact = cost;
    let mut best_approx = cost;

    for k in 1u64..(1u64 << n) {
        let i = k.trailing_zeros() as usize;
        let delta: f64 = -2.0
            * incidence[i]
                .iter()
                .map(|&m| terms[m].coefficient * terms[m].sign(&x))
                .sum::<f64>();
        x[i] ^= 1;
        cost += delta;
        if cost < best_approx - tol {
            best_x.copy_from_slice(&x);
            best_exact = h.energy(&x);
            best_approx = best_exact;
            cost = best_exact;
        } else if cost <= best_approx + tol {
            let exact = h.energy(&x);
            cost = exact;
            if exact < best_exact || (exact == best_exact && x < best_x) {
                best_x.copy_from_slice(&x);
                best_exact = exact;
                best_approx = exact;
            }
        }
    }
    Ok((Assignment(best_x), best_exact))
}

pub(super) fn brute_force_trace(h: &IsingHamiltonian, cfg: &SolverConfig) -> Result<RunTrace> {
    let (x, cost) = brute_force(h)?;
    let n_w = h.num_terms() as u64;
    let evaluations = 1u64 << h.num_qubits();
    let mut ledger = QueryLedger::new(n_w * evaluations);
    ledger.charge(n_w * evaluations);
    // Zero-term problems still produce one strictly positive ledger entry.
    if ledger.total == 0 {
        ledger.charge(1);
    }
    Ok(RunTrace {
        algorithm: Algorithm::BruteForce,
        estimator_mode: None,
        seed: cfg.seed,
        n_w: h.num_terms(),
        n_s: h.num_terms(),
        n_b: cfg.n_b,
        records: vec![EpochRecord {
            epoch: 1,
            queries: ledger.total,
            mean_cost: cost,
            best_cost: cost,
            best_assignment: x.clone(),
        }],
        ledger,
        best_assignment: x.clone(),
        best_cost: cost,
        final_assignment: x,
        final_cost: cost,
        fixed: None,
        seconds: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;
    use crate::hamiltonian::PauliTerm;

    fn naive(h: &IsingHamiltonian) -> (Vec<u8>, f64) {
        let n = h.num_qubits();
        let mut best = (vec![0; n], f64::INFINITY);
        // Lexicographic order with bit 0 most significant.
        for k in 0u32..1 << n {
            let x: Vec<u8> = (0..n).map(|i| ((k >> (n - 1 - i)) & 1) as u8).collect();
            let c = h.evaluate_full(&x).unwrap();
            if c < best.1 {
                best = (x, c);
            }
        }
        best
    }

    #[test]
    fn diagonal_toy() {
        let (x, c) = brute_force(&diag(&[-1.0, 2.0])).unwrap();
        assert_eq!(x.0, vec![1, 0]);
        assert!((c + 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_hamiltonian_ties_to_all_zeros() {
        let h = IsingHamiltonian::new(5, vec![], 0.5).unwrap();
        assert_eq!(brute_force(&h).unwrap(), (Assignment(vec![0; 5]), 0.5));
    }

    #[test]
    fn positive_field_prefers_one() {
        let h = IsingHamiltonian::new(1, vec![PauliTerm::z(2.0, &[0]).unwrap()], 1.0).unwrap();
        assert_eq!(brute_force(&h).unwrap(), (Assignment(vec![1]), -1.0));
    }

    #[test]
    fn agrees_with_naive_enumeration() {
        for seed in 0..20 {
            let h = random_hamiltonian(9, seed);
            let (x, c) = brute_force(&h).unwrap();
            let (nx, nc) = naive(&h);
            assert_eq!(c, nc);
            assert_eq!(x.0, nx);
        }
    }

    #[test]
    fn ties_resolve_lexicographically() {
        // Z0·Z1: both aligned states tie at −1; lexicographic minimum is 00.
        let h = IsingHamiltonian::new(2, vec![PauliTerm::z(-1.0, &[0, 1]).unwrap()], 0.0).unwrap();
        assert_eq!(brute_force(&h).unwrap().0 .0, vec![0, 0]);
        let h = IsingHamiltonian::new(2, vec![PauliTerm::z(1.0, &[0, 1]).unwrap()], 0.0).unwrap();
        assert_eq!(brute_force(&h).unwrap().0 .0, vec![0, 1]);
    }

    #[test]
    fn refuses_large_problems() {
        let h = IsingHamiltonian::zero(25);
        assert!(matches!(
            brute_force(&h),
            Err(Error::TooLarge { num_vars: 25, .. })
        ));
    }
}
