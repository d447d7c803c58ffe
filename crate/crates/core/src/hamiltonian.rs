//! Diagonal Ising Hamiltonians and their classical evaluation.
//!
//! Bits map to Z eigenvalues by `λ(x) = (−1)^x`: bit 0 is eigenvalue `+1`,
//! bit 1 is `−1`. A term `a·Z_i Z_j` therefore evaluates to
//! `a·(−1)^(x_i + x_j)` on a bitstring, and a Hamiltonian is a plain function
//! of the bitstring: `offset + Σ_m a_m λ_m(x)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{QuboInstance, META_OFFSET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// `coefficient · ⊗_{q ∈ support} P_q`. Letters default to Z.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    support: Vec<usize>,
    letters: Option<Vec<Pauli>>,
}

impl PauliTerm {
    pub fn identity(coefficient: f64) -> Self {
        PauliTerm {
            coefficient,
            support: Vec::new(),
            letters: None,
        }
    }

    /// Product of Z on the given qubits.
    pub fn z(coefficient: f64, qubits: &[usize]) -> Result<Self> {
        let mut support = qubits.to_vec();
        support.sort_unstable();
        if support.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "repeated qubit in support {qubits:?}"
            )));
        }
        Ok(PauliTerm {
            coefficient,
            support,
            letters: None,
        })
    }

    /// General Pauli string, e.g. `[(0, Pauli::X), (3, Pauli::Z)]`.
    pub fn with_letters(coefficient: f64, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut ops = ops.to_vec();
        ops.sort_unstable_by_key(|&(q, _)| q);
        if ops.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument(format!("repeated qubit in {ops:?}")));
        }
        let support = ops.iter().map(|&(q, _)| q).collect();
        let letters: Vec<Pauli> = ops.iter().map(|&(_, p)| p).collect();
        let letters = if letters.iter().all(|&p| p == Pauli::Z) {
            None
        } else {
            Some(letters)
        };
        Ok(PauliTerm {
            coefficient,
            support,
            letters,
        })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn is_identity(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_all_z(&self) -> bool {
        self.letters.is_none()
    }

    /// Letter acting on `qubit`, or `None` for identity.
    pub fn letter_at(&self, qubit: usize) -> Option<Pauli> {
        let k = self.support.binary_search(&qubit).ok()?;
        Some(self.letters.as_ref().map_or(Pauli::Z, |l| l[k]))
    }

    fn letters_key(&self) -> Vec<Pauli> {
        self.letters
            .clone()
            .unwrap_or_else(|| vec![Pauli::Z; self.support.len()])
    }

    /// `λ_m(x) = (−1)^(Σ_{j ∈ support} x_j)` without the coefficient.
    #[inline]
    pub(crate) fn sign(&self, x: &[u8]) -> f64 {
        let parity = self.support.iter().fold(0u8, |p, &q| p ^ (x[q] & 1));
        if parity == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Value of a single all-Z term on a bitstring.
pub fn evaluate_term(term: &PauliTerm, x: &[u8]) -> Result<f64> {
    if !term.is_all_z() {
        return Err(Error::UnsupportedTerm(format!(
            "term on {:?} has non-Z letters",
            term.support
        )));
    }
    if let Some(&q) = term.support.iter().find(|&&q| q >= x.len()) {
        return Err(Error::Dimension(format!(
            "qubit {q} outside assignment of length {}",
            x.len()
        )));
    }
    Ok(term.coefficient * term.sign(x))
}

/// Bitstring `x ∈ {0,1}ⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub Vec<u8>);

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment(vec![0; n])
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }
}

impl Deref for Assignment {
    type Target = [u8];

    fn deref(&self) -> &[u8] {
        &self.0
    }
}

impl From<Vec<u8>> for Assignment {
    fn from(bits: Vec<u8>) -> Self {
        Assignment(bits)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Variables fixed by preprocessing, keyed by original index.
pub type FixedVars = BTreeMap<usize, u8>;

#[derive(Debug, Clone, PartialEq)]
pub struct IsingHamiltonian {
    num_qubits: usize,
    terms: Vec<PauliTerm>,
    pub offset: f64,
}

impl IsingHamiltonian {
    /// Builds a Hamiltonian, folding identity terms into the offset.
    ///
    /// Fails if two terms share a Pauli string, a qubit index is out of
    /// range, or a coefficient is zero or non-finite.
    pub fn new(num_qubits: usize, terms: Vec<PauliTerm>, offset: f64) -> Result<Self> {
        let mut offset = offset;
        let mut kept = Vec::with_capacity(terms.len());
        let mut seen = BTreeMap::new();
        for term in terms {
            if !term.coefficient.is_finite() || term.coefficient == 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "term on {:?} has coefficient {}",
                    term.support, term.coefficient
                )));
            }
            if let Some(&q) = term.support.last() {
                if q >= num_qubits {
                    return Err(Error::Dimension(format!(
                        "qubit {q} out of range for {num_qubits} qubits"
                    )));
                }
            } else {
                offset += term.coefficient;
                continue;
            }
            let key = (term.support.clone(), term.letters_key());
            if seen.insert(key, ()).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate term on {:?}",
                    term.support
                )));
            }
            kept.push(term);
        }
        Ok(IsingHamiltonian {
            num_qubits,
            terms: kept,
            offset,
        })
    }

    /// All-Z Hamiltonian from support → coefficient sums; zero sums are dropped.
    fn from_z_map(num_qubits: usize, map: BTreeMap<Vec<usize>, f64>, offset: f64) -> Self {
        let mut offset = offset;
        let mut terms = Vec::with_capacity(map.len());
        for (support, coefficient) in map {
            if support.is_empty() {
                offset += coefficient;
            } else if coefficient != 0.0 {
                terms.push(PauliTerm {
                    coefficient,
                    support,
                    letters: None,
                });
            }
        }
        IsingHamiltonian {
            num_qubits,
            terms,
            offset,
        }
    }

    pub fn zero(num_qubits: usize) -> Self {
        IsingHamiltonian {
            num_qubits,
            terms: Vec::new(),
            offset: 0.0,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// `n_w`, the number of non-identity terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn is_all_z(&self) -> bool {
        self.terms.iter().all(PauliTerm::is_all_z)
    }

    fn require_all_z(&self) -> Result<()> {
        match self.terms.iter().find(|t| !t.is_all_z()) {
            Some(t) => Err(Error::UnsupportedTerm(format!(
                "term on {:?} has non-Z letters",
                t.support
            ))),
            None => Ok(()),
        }
    }

    /// `offset + Σ_m a_m λ_m(x)`, summed in stored term order.
    pub fn evaluate_full(&self, x: &[u8]) -> Result<f64> {
        if x.len() != self.num_qubits {
            return Err(Error::Dimension(format!(
                "assignment has {} bits, hamiltonian has {} qubits",
                x.len(),
                self.num_qubits
            )));
        }
        self.require_all_z()?;
        Ok(self.energy(x))
    }

    /// Unchecked [`evaluate_full`](Self::evaluate_full) for hot loops.
    #[inline]
    pub(crate) fn energy(&self, x: &[u8]) -> f64 {
        let sum: f64 = self.terms.iter().map(|t| t.coefficient * t.sign(x)).sum();
        self.offset + sum
    }

    /// For each qubit, the indices of the terms acting on it.
    pub(crate) fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.num_qubits];
        for (m, t) in self.terms.iter().enumerate() {
            for &q in &t.support {
                inc[q].push(m);
            }
        }
        inc
    }
}

/// Maps `λ·xᵀVx − (1−λ)·rᵀx` onto an Ising Hamiltonian under `x_i = (1 − s_i)/2`.
///
/// Each diagonal `d·x_i` becomes `d/2 − (d/2)·Z_i`; each stored pair
/// contributes `w·x_i·x_j` with `w = 2λV_ij`, which expands to
/// `(w/4)(1 − Z_i − Z_j + Z_i Z_j)`. Two-body terms are `i < j` and all
/// constants collect in the offset.
pub fn qubo_to_ising(
    instance: &QuboInstance,
    linear: Option<&[f64]>,
    risk_weight: f64,
) -> Result<IsingHamiltonian> {
    let n = instance.num_vars;
    if let Some(r) = linear {
        if r.len() != n {
            return Err(Error::Dimension(format!(
                "linear vector has {} values, instance has {n} variables",
                r.len()
            )));
        }
    }
    if !(0.0..=1.0).contains(&risk_weight) {
        return Err(Error::InvalidArgument(format!(
            "risk weight {risk_weight} outside [0, 1]"
        )));
    }
    if let Some(&(i, j)) = instance.entries.keys().find(|&&(i, j)| i > j || j >= n) {
        return Err(Error::Dimension(format!(
            "entry ({i}, {j}) invalid for {n} variables"
        )));
    }

    let mut diag = vec![0.0; n];
    if let Some(r) = linear {
        for (d, &ri) in diag.iter_mut().zip(r) {
            *d -= (1.0 - risk_weight) * ri;
        }
    }
    let mut map: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let mut offset = 0.0;
    for (&(i, j), &v) in &instance.entries {
        if i == j {
            diag[i] += risk_weight * v;
        } else {
            let quarter = 0.5 * risk_weight * v;
            offset += quarter;
            *map.entry(vec![i]).or_insert(0.0) -= quarter;
            *map.entry(vec![j]).or_insert(0.0) -= quarter;
            *map.entry(vec![i, j]).or_insert(0.0) += quarter;
        }
    }
    for (i, &d) in diag.iter().enumerate() {
        if d != 0.0 {
            offset += 0.5 * d;
            *map.entry(vec![i]).or_insert(0.0) -= 0.5 * d;
        }
    }
    Ok(IsingHamiltonian::from_z_map(n, map, offset))
}

/// The Hamiltonian of an instance's full objective, including
/// `metadata.offset` and the risk-weighted linear vector when present.
pub fn instance_hamiltonian(instance: &QuboInstance) -> Result<IsingHamiltonian> {
    let lambda = instance.risk_weight()?;
    let mut h = qubo_to_ising(instance, instance.linear.as_deref(), lambda)?;
    h.offset += instance.offset()?;
    Ok(h)
}

/// Inverse of [`qubo_to_ising`] for one- and two-body all-Z Hamiltonians.
/// The constant part is stored in `metadata.offset`.
pub fn ising_to_qubo(h: &IsingHamiltonian) -> Result<QuboInstance> {
    h.require_all_z()?;
    let mut inst = QuboInstance::new(h.num_qubits);
    let mut constant = h.offset;
    for t in &h.terms {
        let a = t.coefficient;
        match *t.support.as_slice() {
            [i] => {
                constant += a;
                inst.add(i, i, -2.0 * a);
            }
            [i, j] => {
                constant += a;
                inst.add(i, i, -2.0 * a);
                inst.add(j, j, -2.0 * a);
                inst.add(i, j, 2.0 * a);
            }
            _ => {
                return Err(Error::UnsupportedTerm(format!(
                    "term on {:?} has more than two qubits",
                    t.support
                )))
            }
        }
    }
    if constant != 0.0 {
        inst.metadata
            .insert(META_OFFSET.into(), constant.to_string());
    }
    Ok(inst)
}

/// True iff the two Pauli strings agree wherever both act non-trivially.
pub fn qwc_check(a: &PauliTerm, b: &PauliTerm) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.support.len() && j < b.support.len() {
        let (qa, qb) = (a.support[i], b.support[j]);
        if qa < qb {
            i += 1;
        } else if qb < qa {
            j += 1;
        } else {
            if a.letter_at(qa) != b.letter_at(qb) {
                return false;
            }
            i += 1;
            j += 1;
        }
    }
    true
}

/// Greedy first-fit partition of term indices into qubit-wise commuting groups.
pub fn group_qwc(h: &IsingHamiltonian) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (m, term) in h.terms.iter().enumerate() {
        let slot = groups
            .iter()
            .position(|g| g.iter().all(|&k| qwc_check(&h.terms[k], term)));
        match slot {
            Some(g) => groups[g].push(m),
            None => groups.push(vec![m]),
        }
    }
    groups
}

/// Result of diagonal-dominance preprocessing.
#[derive(Debug, Clone, PartialEq)]
pub struct Preprocessed {
    pub fixed: FixedVars,
    /// Hamiltonian over the remaining variables, re-indexed `0..remaining.len()`.
    pub hamiltonian: IsingHamiltonian,
    /// Original index of each reduced qubit.
    pub remaining: Vec<usize>,
}

impl Preprocessed {
    /// Expands a reduced assignment back to the original variables.
    pub fn lift(&self, reduced: &[u8]) -> Assignment {
        let n = self.fixed.len() + self.remaining.len();
        let mut bits = vec![0u8; n];
        for (&q, &b) in &self.fixed {
            bits[q] = b;
        }
        for (k, &q) in self.remaining.iter().enumerate() {
            bits[q] = reduced[k];
        }
        Assignment(bits)
    }

    /// Projects an original assignment onto the remaining variables.
    pub fn restrict(&self, full: &[u8]) -> Vec<u8> {
        self.remaining.iter().map(|&q| full[q]).collect()
    }

    pub fn is_consistent(&self, full: &[u8]) -> bool {
        self.fixed.iter().all(|(&q, &b)| full[q] == b)
    }
}

/// Single-pass diagonal-dominance preprocessing.
///
/// Qubit `i` is fixed when its one-body coefficient satisfies
/// `|c_i| > Σ |a_m|` over every other term acting on `i`. Then the sign of
/// `c_i·λ(x_i)` is the same for every optimum: `x_i = 1` when `c_i > 0`,
/// `x_i = 0` when `c_i < 0`. Fixed spins are substituted and the remaining
/// qubits re-indexed. Runs in `O(n_w)` after one incidence pass.
pub fn preprocess_dominant(h: &IsingHamiltonian) -> Result<Preprocessed> {
    h.require_all_z()?;
    let n = h.num_qubits;
    let mut single = vec![0.0; n];
    let mut mass = vec![0.0; n];
    for t in &h.terms {
        if let [q] = *t.support.as_slice() {
            single[q] += t.coefficient;
        } else {
            for &q in &t.support {
                mass[q] += t.coefficient.abs();
            }
        }
    }
    let fixed: FixedVars = (0..n)
        .filter(|&q| single[q] != 0.0 && single[q].abs() > mass[q])
        .map(|q| (q, u8::from(single[q] > 0.0)))
        .collect();
    if fixed.is_empty() {
        return Ok(Preprocessed {
            fixed,
            hamiltonian: h.clone(),
            remaining: (0..n).collect(),
        });
    }

    let remaining: Vec<usize> = (0..n).filter(|q| !fixed.contains_key(q)).collect();
    let mut new_index = vec![usize::MAX; n];
    for (k, &q) in remaining.iter().enumerate() {
        new_index[q] = k;
    }
    let mut map: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let mut offset = h.offset;
    for t in &h.terms {
        let mut coefficient = t.coefficient;
        let mut support = Vec::with_capacity(t.support.len());
        for &q in &t.support {
            match fixed.get(&q) {
                Some(1) => coefficient = -coefficient,
                Some(_) => {}
                None => support.push(new_index[q]),
            }
        }
        if support.is_empty() {
            offset += coefficient;
        } else {
            *map.entry(support).or_insert(0.0) += coefficient;
        }
    }
    Ok(Preprocessed {
        fixed,
        hamiltonian: IsingHamiltonian::from_z_map(remaining.len(), map, offset),
        remaining,
    })
}
