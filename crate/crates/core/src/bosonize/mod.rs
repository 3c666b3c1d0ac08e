//! Bosonization: ladder-operator algebra, Holstein-Primakoff expansion,
//! Fock-space matrices and the plane-wave Hamiltonian.

mod fock;
mod hp;
mod kspace;
mod ops;

pub use fock::{build_fock_matrix, make_fock_space, FockSpace};
pub use hp::{hp_expand, HpExpansion, NonConserving};
pub use kspace::{kspace_coefficients, magnon_energy, KSpaceHamiltonian};
pub use ops::{BosonTermSum, Ladder, Mode, Op, Term};
