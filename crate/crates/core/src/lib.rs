//! Simulation and design toolkit for a qubit encoded in two coupled magnon
//! Bose-Einstein condensates.
//!
//! The pipeline runs from a two-sample spin lattice with exchange and
//! dipolar couplings, through the Holstein-Primakoff boson expansion and its
//! plane-wave form, down to the two-mode condensate Hamiltonian and its
//! charge-qubit-like reduction. A brute-force spin diagonalizer serves as an
//! independent check of the bosonic route.

pub mod bosonize;
pub mod couplings;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod qubit;
pub mod spin_exact;

pub use bosonize::{
    build_fock_matrix, hp_expand, kspace_coefficients, magnon_energy, make_fock_space, BosonTermSum, FockSpace,
    HpExpansion, KSpaceHamiltonian, Ladder, Mode, NonConserving, Op, Term,
};
pub use couplings::{
    build_couplings, fourier_cross, fourier_intra, symmetry_report, symmetry_report_for, CouplingTable,
    ExchangeModel, FourierTable, SymmetryReport,
};
pub use dynamics::{
    basis_state, isolated_pair_space, leakage, measure_rabi_frequency, propagate, propagate_segments,
    scaling_study, shell_leakage, shell_space, two_level, LeakageReport, ScalingRow, Trajectory,
    TwoLevelModel, DENSE_PROPAGATION_LIMIT,
};
pub use error::{Error, Result};
pub use lattice::{LatticeSpec, Sample, SampleShape, Site, WaveVector};
pub use linalg::{CVector, SparseMatrix};
pub use qubit::{
    basic_params, doublewell_params, nonsecular_k, scan_roots, solve_synchronism, square_form,
    symmetric_qubit, synchronism_residual, CondensateCouplings, NonsecularK, QubitModel,
    QubitParams, SquareForm, SymmetricQubit, SynchronismForm, SynchronismInput, SynchronismModel,
    SynchronismSolution, SynchronismUnknown, SYNCHRONISM_TOL,
};
pub use spin_exact::{
    build_sector_matrix, build_spin_matrix, exact_dispersion, spectrum, SpinOperatorMatrix,
};

pub use num_complex::Complex64;
