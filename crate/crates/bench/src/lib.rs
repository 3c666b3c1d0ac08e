//! Shared fixtures for the benchmarks.

use magqubit::{build_couplings, CouplingTable, ExchangeModel, LatticeSpec, QubitParams, Complex64};

/// Two stacked periodic films with exchange and dipolar couplings.
pub fn film_pair(side: usize) -> (LatticeSpec, CouplingTable) {
    let lat = LatticeSpec::boxes([side, side, 1], [true; 3], 1.0, [1.0, 1.0], [0.1, 0.2]).expect("lattice");
    let table = build_couplings(&lat, &ExchangeModel::NearestNeighbor(1.0), &ExchangeModel::Uniform(0.03), 0.05)
        .expect("couplings");
    (lat, table)
}

/// Isotropic Heisenberg rings without cross coupling.
pub fn rings(n: usize) -> (LatticeSpec, CouplingTable) {
    let lat = LatticeSpec::rings(n, [0.5, 0.5], [0.2, 0.2]).expect("lattice");
    let table = build_couplings(&lat, &ExchangeModel::NearestNeighbor(1.0), &ExchangeModel::None, 0.0)
        .expect("couplings");
    (lat, table)
}

/// Symmetric anharmonic qubit at its degeneracy point.
pub fn qubit() -> QubitParams {
    QubitParams::effective([0.0, 0.4], [0.1, 0.1], 0.2, Complex64::new(0.005, 0.0), 1e-4)
}
