//! Independent cross-checks between the representations of the model:
//! exact spin diagonalization, the real-space boson expansion, the
//! plane-wave Hamiltonian and the condensate reduction.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bosonize::{build_fock_matrix, hp_expand, kspace_coefficients, make_fock_space, Mode};
use crate::couplings::{build_couplings, CouplingTable, ExchangeModel, FourierTable, Tensor};
use crate::error::{Error, Result};
use crate::lattice::{dot, LatticeSpec, WaveVector};
use crate::linalg::{hermitian_eigen, SparseMatrix};
use crate::qubit::basic_params;
use crate::spin_exact::{build_sector_matrix, exact_dispersion};

/// Sample shapes drawn by `random_translation_invariant`; all have at most six sites.
const RANDOM_DIMS: [[usize; 3]; 7] = [
    [2, 1, 1],
    [3, 1, 1],
    [4, 1, 1],
    [5, 1, 1],
    [6, 1, 1],
    [2, 2, 1],
    [3, 2, 1],
];

const RANDOM_SPINS: [f64; 3] = [0.5, 1.0, 1.5];

/// Periodic two-sample system with random couplings that depend only on the
/// cell displacement. Dipolar tensors are `diag(a, a, b)`, so total `S^z` is
/// conserved.
pub fn random_translation_invariant(seed: u64) -> Result<(LatticeSpec, CouplingTable)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = RANDOM_DIMS[rng.gen_range(0..RANDOM_DIMS.len())];
    let spins = [
        RANDOM_SPINS[rng.gen_range(0..RANDOM_SPINS.len())],
        RANDOM_SPINS[rng.gen_range(0..RANDOM_SPINS.len())],
    ];
    let fields = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
    let lattice = LatticeSpec::boxes(dims, [true; 3], 1.0, spins, fields)?;
    let n = lattice.n_per_sample();
    let mut table = CouplingTable::zeros(lattice.n_sites());

    let wrap = |a: [usize; 3], b: [usize; 3]| -> [usize; 3] {
        [0, 1, 2].map(|x| (a[x] + dims[x] - b[x]) % dims[x])
    };
    let negate = |d: [usize; 3]| -> [usize; 3] { [0, 1, 2].map(|x| (dims[x] - d[x]) % dims[x]) };
    let draw = |rng: &mut ChaCha8Rng| -> (f64, Tensor) {
        let j = rng.gen_range(-1.0..1.0);
        let a = rng.gen_range(-0.3..0.3);
        let b = rng.gen_range(-0.3..0.3);
        (j, Tensor::from_diagonal(&nalgebra::Vector3::new(a, a, b)))
    };

    for m in 0..2 {
        let mut classes: BTreeMap<[usize; 3], (f64, Tensor)> = BTreeMap::new();
        let range = lattice.sample_range(m);
        for i in range.clone() {
            for j in range.clone().filter(|&j| j > i) {
                let d = wrap(lattice.cell(i).expect("box"), lattice.cell(j).expect("box"));
                let key = d.min(negate(d));
                let (jx, t) = *classes.entry(key).or_insert_with(|| draw(&mut rng));
                table.set_exchange(i, j, jx);
                table.set_dipole(i, j, t)?;
            }
        }
    }
    let mut classes: BTreeMap<[usize; 3], (f64, Tensor)> = BTreeMap::new();
    for i in lattice.sample_range(0) {
        for j in lattice.sample_range(1) {
            let d = wrap(lattice.cell(i).expect("box"), lattice.cell(j).expect("box"));
            let (jx, t) = *classes.entry(d).or_insert_with(|| draw(&mut rng));
            table.set_exchange(i, j, 0.5 * jx);
            table.set_dipole(i, j, t * 0.5)?;
        }
    }
    debug_assert_eq!(lattice.n_sites(), 2 * n);
    Ok((lattice, table))
}

/// Largest entry of `a - b` together with the larger of the two norms.
fn matrix_difference(a: &SparseMatrix, b: &SparseMatrix) -> (f64, f64) {
    let mut diff = 0.0f64;
    for i in 0..a.dim() {
        let mut row: BTreeMap<usize, Complex64> = BTreeMap::new();
        for &(j, v) in a.row(i) {
            *row.entry(j).or_default() += v;
        }
        for &(j, v) in b.row(i) {
            *row.entry(j).or_default() -= v;
        }
        diff = row.values().map(|v| v.norm()).fold(diff, f64::max);
    }
    (diff, a.max_abs().max(b.max_abs()))
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixComparison {
    pub dim: usize,
    pub scale: f64,
    pub deviation: f64,
}

impl MatrixComparison {
    pub fn relative(&self) -> f64 {
        self.deviation / self.scale.max(1.0)
    }
}

/// Compares the real-space boson Hamiltonian, rewritten in plane waves, with
/// the plane-wave Hamiltonian built from the Fourier sums, as matrices on the
/// Fock space of all modes with at most `shell` magnons.
pub fn realspace_kspace_equivalence(
    lattice: &LatticeSpec,
    table: &CouplingTable,
    shell: u32,
) -> Result<MatrixComparison> {
    let n = lattice.n_per_sample();
    let grids = [lattice.k_grid(0)?, lattice.k_grid(1)?];
    let real = hp_expand(lattice, table, false)?.conserving_terms();
    let fourier = FourierTable::full(table, lattice)?;
    let kspace = kspace_coefficients(&fourier, lattice, [&grids[0], &grids[1]])?;

    let norm = 1.0 / (n as f64).sqrt();
    let sites = lattice.sites();
    let rewritten = real.transform(|mode| match *mode {
        Mode::Site(i) => {
            let m = sites[i].sample;
            Some(
                grids[m]
                    .iter()
                    .map(|k| {
                        let phase = Complex64::from_polar(norm, dot(&k.value(), &sites[i].local));
                        (Mode::Wave { sample: m, k: *k }, phase)
                    })
                    .collect(),
            )
        }
        _ => None,
    });

    let modes = kspace.mode_list();
    let caps = vec![shell; modes.len()];
    let space = make_fock_space(modes, caps, Some(shell))?;
    let a = build_fock_matrix(&rewritten, &space)?;
    let b = build_fock_matrix(&kspace.terms(), &space)?;
    let (deviation, scale) = matrix_difference(&a, &b);
    Ok(MatrixComparison {
        dim: space.dim(),
        scale,
        deviation,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DispersionRow {
    pub k: WaveVector,
    pub exact: f64,
    pub boson: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DispersionCheck {
    pub n: usize,
    pub spin: f64,
    pub field: f64,
    pub rows: Vec<DispersionRow>,
    pub deviation: f64,
}

/// One-magnon energies of a nearest-neighbour ring from exact diagonalization
/// against the quadratic boson coefficients.
pub fn dispersion_check(n: usize, spin: f64, field: f64, exchange: f64) -> Result<DispersionCheck> {
    let lattice = LatticeSpec::rings(n, [spin, spin], [field, field])?;
    let table = build_couplings(
        &lattice,
        &ExchangeModel::NearestNeighbor(exchange),
        &ExchangeModel::None,
        0.0,
    )?;
    let exact = exact_dispersion(&lattice, &table, 0)?;
    let grids = [lattice.k_grid(0)?, lattice.k_grid(1)?];
    let fourier = FourierTable::full(&table, &lattice)?;
    let kspace = kspace_coefficients(&fourier, &lattice, [&grids[0], &grids[1]])?;
    let rows: Vec<DispersionRow> = exact
        .into_iter()
        .map(|(k, e)| DispersionRow {
            k,
            exact: e,
            boson: kspace.a_intra[&(0, k)],
        })
        .collect();
    let deviation = rows.iter().map(|r| (r.exact - r.boson).abs()).fold(0.0, f64::max);
    Ok(DispersionCheck {
        n,
        spin,
        field,
        rows,
        deviation,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OneMagnonCheck {
    pub dim: usize,
    /// `|E_polarized - H0|`.
    pub ground_deviation: f64,
    /// Largest eigenvalue difference in the one-magnon sector.
    pub deviation: f64,
}

/// Exact spectrum of the coupled two-sample system in the fully polarized and
/// one-deviation sectors against the boson constant and the plane-wave
/// one-magnon spectrum. Both are exact for `S^z`-conserving couplings.
pub fn one_magnon_check(lattice: &LatticeSpec, table: &CouplingTable) -> Result<OneMagnonCheck> {
    let sites: Vec<usize> = (0..lattice.n_sites()).collect();
    let ground = build_sector_matrix(lattice, table, sites.clone(), 0)?;
    let e0 = ground.matrix.get(0, 0).re;
    let one = build_sector_matrix(lattice, table, sites, 1)?;
    let (exact, _) = hermitian_eigen(&one.matrix.to_dense());

    let hp = hp_expand(lattice, table, false)?;
    let grids = [lattice.k_grid(0)?, lattice.k_grid(1)?];
    let fourier = FourierTable::full(table, lattice)?;
    let kspace = kspace_coefficients(&fourier, lattice, [&grids[0], &grids[1]])?;
    let modes = kspace.mode_list();
    let caps = vec![1; modes.len()];
    let space = make_fock_space(modes, caps, Some(1))?;
    let h = build_fock_matrix(&kspace.terms(), &space)?;
    let dense = h.to_dense();
    let one_states: Vec<usize> = space
        .total_number()
        .iter()
        .enumerate()
        .filter(|(_, n)| **n == 1.0)
        .map(|(i, _)| i)
        .collect();
    let block = nalgebra::DMatrix::from_fn(one_states.len(), one_states.len(), |r, c| {
        dense[(one_states[r], one_states[c])]
    });
    let (boson, _) = hermitian_eigen(&block);
    let boson: Vec<f64> = boson.into_iter().map(|e| e + hp.constant).collect();
    if boson.len() != exact.len() {
        return Err(Error::Precondition(format!(
            "one-magnon sector dimension {} differs from boson count {}",
            exact.len(),
            boson.len()
        )));
    }
    let deviation = exact.iter().zip(&boson).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(OneMagnonCheck {
        dim: exact.len(),
        ground_deviation: (e0 - hp.constant).abs(),
        deviation,
    })
}

/// Condensate Hamiltonian from `basic_params` against the plane-wave
/// Hamiltonian restricted to the two zero modes, on the shell of `shell`
/// magnons with independent caps.
pub fn condensate_projection(lattice: &LatticeSpec, table: &CouplingTable, shell: u32) -> Result<MatrixComparison> {
    let zero = [
        WaveVector::zero(lattice.dims(0)?),
        WaveVector::zero(lattice.dims(1)?),
    ];
    let fourier = FourierTable::for_modes(table, lattice, &zero[..1], &zero[1..])?;
    let params = basic_params(&fourier, lattice)?;
    let kspace = kspace_coefficients(&fourier, lattice, [&zero[..1], &zero[1..]])?;
    let projected = kspace.terms().transform(|mode| match *mode {
        Mode::Wave { sample, .. } => Some(vec![(Mode::Condensate(sample), Complex64::new(1.0, 0.0))]),
        _ => None,
    });
    let space = make_fock_space(params.modes(), vec![shell; 2], Some(shell))?;
    let a = build_fock_matrix(&params.hamiltonian(), &space)?;
    let b = build_fock_matrix(&projected, &space)?;
    let (deviation, scale) = matrix_difference(&a, &b);
    Ok(MatrixComparison {
        dim: space.dim(),
        scale,
        deviation,
    })
}
