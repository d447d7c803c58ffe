//! Benchmark fixtures.

use qimf_core::hamiltonian::instance_hamiltonian;
use qimf_core::problems::wsbm_portfolio;
use qimf_core::{IsingHamiltonian, WeightDistribution, WsbmSpec};

/// Portfolio Hamiltonian over `blocks` blocks of `size` assets, fixed seed.
pub fn portfolio(blocks: usize, size: usize) -> IsingHamiltonian {
    let normal = |std| WeightDistribution::Normal { mean: 0.0, std };
    let spec = WsbmSpec::planted(vec![size; blocks], 0.2, 0.05, normal(0.2), normal(0.05));
    let inst = wsbm_portfolio(&spec, &normal(0.2), 0.5, 7).expect("valid spec");
    instance_hamiltonian(&inst).expect("valid instance")
}
