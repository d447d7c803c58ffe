//! Mean-field probabilistic optimization for QUBO problems.
//!
//! A QUBO instance `min xᵀVx, x ∈ {0,1}ⁿ` is mapped onto a diagonal Ising
//! Hamiltonian and evaluated classically, term by term. The solver keeps an
//! independent two-way softmax per variable, samples candidate bitstrings,
//! scores them with a cost estimate that only touches `n_s` of the `n_w`
//! Hamiltonian terms (picked with probability `∝ a_m²`), and follows the
//! score-function gradient with ADAM.
//!
//! Module map:
//!
//! * [`instance`]: QUBO instances, weighted stochastic block model generation, JSON I/O
//! * [`hamiltonian`]: QUBO → Ising mapping, exact evaluation, QWC grouping, preprocessing
//! * [`estimator`]: amplitude-based shot allocation and the subsampled cost
//! * [`meanfield`]: the factorized softmax model, its gradients, ADAM
//! * [`solver`]: the optimization loops, classical baselines and a brute-force oracle
//! * [`problems`]: portfolio, weighted max-cut and Ising problem builders

pub mod error;
pub mod estimator;
pub mod hamiltonian;
pub mod instance;
pub mod meanfield;
pub mod problems;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use estimator::{EstimatorMode, ShotAllocator};
pub use hamiltonian::{Assignment, FixedVars, IsingHamiltonian, Pauli, PauliTerm, Preprocessed};
pub use instance::{QuboInstance, WeightDistribution, WsbmSpec};
pub use meanfield::{AdamConfig, AdamState, MeanFieldModel, SampleBatch};
pub use problems::{Graph, PriceTable};
pub use solver::{Algorithm, EpochRecord, QueryLedger, RunTrace, SolverConfig};
