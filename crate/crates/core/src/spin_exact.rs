//! Brute-force spin Hamiltonian on the full product space of the lattice.
//!
//! Serves as the oracle for the bosonic route: for tiny systems it builds
//!
//! `H = -sum_{pairs} sum_{ab} (J delta_ab + D_ab) S^a_i S^b_j - sum_i h S^z_i`
//!
//! with every unordered pair counted once, on the basis of `S^z` eigenstates.

use std::collections::HashMap;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::couplings::{symmetry_report_for, CouplingTable};
use crate::error::{Error, Result};
use crate::lattice::{dot, LatticeSpec, WaveVector};
use crate::linalg::{hermitian_eigen, lowest_eigenvalues, SparseMatrix};

pub const DEFAULT_DIMENSION_CAP: usize = 1 << 20;
const DENSE_LIMIT: usize = 4096;

/// Product basis over a subset of sites. Local digit `a` encodes `m = S - a`,
/// so the all-zero state is fully polarized along +z.
#[derive(Debug, Clone)]
pub struct SpinBasis {
    sites: Vec<usize>,
    spins: Vec<f64>,
    radix: Vec<u64>,
    strides: Vec<u64>,
    /// Sorted codes when restricted to a magnon-number sector.
    sector: Option<Vec<u64>>,
    dim: usize,
}

impl SpinBasis {
    fn new(lattice: &LatticeSpec, sites: Vec<usize>, magnons: Option<u32>, cap: usize) -> Result<Self> {
        let spins: Vec<f64> = sites.iter().map(|&i| lattice.site_spin(i)).collect();
        let radix: Vec<u64> = spins.iter().map(|s| (2.0 * s).round() as u64 + 1).collect();
        let mut strides = Vec::with_capacity(radix.len());
        let mut total: u128 = 1;
        for r in &radix {
            strides.push(total as u64);
            total *= *r as u128;
            if total > u64::MAX as u128 / 64 {
                return Err(Error::DimensionCap {
                    dimension: usize::MAX,
                    cap,
                });
            }
        }
        let full = total as usize;
        let (sector, dim) = match magnons {
            None => {
                if full > cap {
                    return Err(Error::DimensionCap {
                        dimension: full,
                        cap,
                    });
                }
                (None, full)
            }
            Some(n) => {
                let mut codes = Vec::new();
                let mut digits = vec![0u64; radix.len()];
                enumerate_sector(&radix, n as u64, 0, &mut digits, &mut |d| {
                    codes.push(d.iter().zip(&strides).map(|(a, s)| a * s).sum());
                });
                if codes.len() > cap {
                    return Err(Error::DimensionCap {
                        dimension: codes.len(),
                        cap,
                    });
                }
                codes.sort_unstable();
                let dim = codes.len();
                (Some(codes), dim)
            }
        };
        Ok(Self {
            sites,
            spins,
            radix,
            strides,
            sector,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn code(&self, index: usize) -> u64 {
        match &self.sector {
            Some(c) => c[index],
            None => index as u64,
        }
    }

    fn index(&self, code: u64) -> Option<usize> {
        match &self.sector {
            Some(c) => c.binary_search(&code).ok(),
            None => Some(code as usize),
        }
    }

    fn digit(&self, code: u64, slot: usize) -> u64 {
        (code / self.strides[slot]) % self.radix[slot]
    }

    /// Local digits of a basis state.
    pub fn digits(&self, index: usize) -> Vec<u64> {
        let code = self.code(index);
        (0..self.radix.len()).map(|s| self.digit(code, s)).collect()
    }
}

fn enumerate_sector(radix: &[u64], left: u64, slot: usize, digits: &mut [u64], f: &mut impl FnMut(&[u64])) {
    if slot == radix.len() {
        if left == 0 {
            f(digits);
        }
        return;
    }
    for a in 0..radix[slot].min(left + 1) {
        digits[slot] = a;
        enumerate_sector(radix, left - a, slot + 1, digits, f);
    }
    digits[slot] = 0;
}

/// Action of `S^alpha` (0 = x, 1 = y, 2 = z) on local digit `a` of spin `s`.
fn spin_action(alpha: usize, s: f64, a: u64, radix: u64) -> Vec<(Complex64, u64)> {
    let m = s - a as f64;
    let mut out = Vec::with_capacity(2);
    if alpha == 2 {
        out.push((Complex64::new(m, 0.0), a));
        return out;
    }
    // S+ lowers the digit, S- raises it
    let plus = if a >= 1 {
        Some(((s * (s + 1.0) - m * (m + 1.0)).sqrt(), a - 1))
    } else {
        None
    };
    let minus = if a + 1 < radix {
        Some(((s * (s + 1.0) - m * (m - 1.0)).sqrt(), a + 1))
    } else {
        None
    };
    let (cp, cm) = if alpha == 0 {
        (Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0))
    } else {
        (Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.5))
    };
    if let Some((v, b)) = plus {
        out.push((cp * v, b));
    }
    if let Some((v, b)) = minus {
        out.push((cm * v, b));
    }
    out
}

#[derive(Debug, Clone)]
pub struct SpinOperatorMatrix {
    pub basis: SpinBasis,
    pub matrix: SparseMatrix,
}

impl SpinOperatorMatrix {
    pub fn dimension(&self) -> usize {
        self.basis.dim()
    }

    /// Total `S^z` of every basis state.
    pub fn total_sz(&self) -> Vec<f64> {
        (0..self.basis.dim())
            .map(|i| {
                self.basis
                    .digits(i)
                    .iter()
                    .zip(&self.basis.spins)
                    .map(|(a, s)| s - *a as f64)
                    .sum()
            })
            .collect()
    }
}

fn build_on(
    lattice: &LatticeSpec,
    table: &CouplingTable,
    sites: Vec<usize>,
    magnons: Option<u32>,
    cap: usize,
) -> Result<SpinOperatorMatrix> {
    let basis = SpinBasis::new(lattice, sites, magnons, cap)?;
    let nslots = basis.sites.len();

    let mut pairs = Vec::new();
    for p in 0..nslots {
        for q in p + 1..nslots {
            let t = table.tensor(basis.sites[p], basis.sites[q]);
            if t.iter().any(|x| *x != 0.0) {
                pairs.push((p, q, t));
            }
        }
    }
    let fields: Vec<f64> = basis.sites.iter().map(|&i| lattice.field(lattice.sites()[i].sample)).collect();

    let mut triplets = Vec::new();
    // individual products such as S^x S^x leave the sector; only their sum must not
    let mut leaked: HashMap<(u64, usize), Complex64> = HashMap::new();
    for col in 0..basis.dim() {
        let code = basis.code(col);
        let mut diag = 0.0;
        for slot in 0..nslots {
            let a = basis.digit(code, slot);
            diag -= fields[slot] * (basis.spins[slot] - a as f64);
        }
        if diag != 0.0 {
            triplets.push((col, col, Complex64::new(diag, 0.0)));
        }
        for (p, q, t) in &pairs {
            let (ap, aq) = (basis.digit(code, *p), basis.digit(code, *q));
            for alpha in 0..3 {
                let left = spin_action(alpha, basis.spins[*p], ap, basis.radix[*p]);
                for beta in 0..3 {
                    let k = t[(alpha, beta)];
                    if k == 0.0 {
                        continue;
                    }
                    for (c1, bp) in &left {
                        for (c2, bq) in spin_action(beta, basis.spins[*q], aq, basis.radix[*q]) {
                            let new = code - ap * basis.strides[*p] + bp * basis.strides[*p]
                                - aq * basis.strides[*q]
                                + bq * basis.strides[*q];
                            match basis.index(new) {
                                Some(row) => triplets.push((row, col, -k * c1 * c2)),
                                None => {
                                    *leaked.entry((new, col)).or_insert(Complex64::new(0.0, 0.0)) +=
                                        -k * c1 * c2
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let violation = leaked.values().map(|v| v.norm()).fold(0.0, f64::max);
    let scale = pairs.iter().map(|(_, _, t)| t.abs().max()).fold(1.0, f64::max);
    if violation > 1e-12 * scale {
        return Err(Error::SzNotConserved { violation });
    }
    let matrix = SparseMatrix::from_triplets(basis.dim(), triplets);
    Ok(SpinOperatorMatrix { basis, matrix })
}

/// Full spin Hamiltonian of both samples with the default dimension cap.
pub fn build_spin_matrix(lattice: &LatticeSpec, table: &CouplingTable) -> Result<SpinOperatorMatrix> {
    build_spin_matrix_capped(lattice, table, DEFAULT_DIMENSION_CAP)
}

pub fn build_spin_matrix_capped(
    lattice: &LatticeSpec,
    table: &CouplingTable,
    cap: usize,
) -> Result<SpinOperatorMatrix> {
    build_on(lattice, table, (0..lattice.n_sites()).collect(), None, cap)
}

/// Hamiltonian restricted to a fixed number of spin deviations (total
/// `S^z = S_max - magnons`) on a subset of sites. Fails if the couplings
/// connect the sector to others.
pub fn build_sector_matrix(
    lattice: &LatticeSpec,
    table: &CouplingTable,
    sites: Vec<usize>,
    magnons: u32,
) -> Result<SpinOperatorMatrix> {
    build_on(lattice, table, sites, Some(magnons), DEFAULT_DIMENSION_CAP)
}

/// Lowest `count` eigenvalues, ascending, degenerate values repeated.
pub fn spectrum(matrix: &SpinOperatorMatrix, count: usize) -> Result<Vec<f64>> {
    sparse_spectrum(&matrix.matrix, count)
}

pub fn sparse_spectrum(m: &SparseMatrix, count: usize) -> Result<Vec<f64>> {
    if count > m.dim() {
        return Err(Error::Precondition(format!(
            "count {count} exceeds dimension {}",
            m.dim()
        )));
    }
    let residual = m.hermiticity_residual();
    if residual > 1e-10 {
        return Err(Error::NotHermitian { residual });
    }
    if m.dim() < DENSE_LIMIT {
        let (values, _) = hermitian_eigen(&m.to_dense());
        Ok(values[..count].to_vec())
    } else {
        lowest_eigenvalues(m, count, 1e-11, 0x5eed)
    }
}

/// One-magnon energies `E(k) - E_polarized` of a single sample.
///
/// The one-deviation sector is diagonalized densely; each eigenvalue is then
/// attached to the plane wave that the translation operator assigns to it.
pub fn exact_dispersion(
    lattice: &LatticeSpec,
    table: &CouplingTable,
    sample: usize,
) -> Result<Vec<(WaveVector, f64)>> {
    let report = symmetry_report_for(table, lattice, Some(sample));
    if !report.conserves_sz {
        return Err(Error::SzNotConserved {
            violation: report.sz_violation(),
        });
    }
    let sites: Vec<usize> = lattice.sample_range(sample).collect();
    let ground = build_sector_matrix(lattice, table, sites.clone(), 0)?;
    let e_ref = ground.matrix.get(0, 0).re;
    let one = build_sector_matrix(lattice, table, sites.clone(), 1)?;
    let h = one.matrix.to_dense();
    let (eigen, _) = hermitian_eigen(&h);
    let scale = one.matrix.max_abs().max(1.0);

    // basis state index -> site slot carrying the deviation
    let dim = one.basis.dim();
    let slot_of: Vec<usize> = (0..dim)
        .map(|i| one.basis.digits(i).iter().position(|&a| a == 1).expect("one deviation"))
        .collect();
    let norm = 1.0 / (dim as f64).sqrt();
    let mut out = Vec::with_capacity(dim);
    let mut labelled = Vec::with_capacity(dim);
    for k in lattice.k_grid(sample)? {
        let kv = k.value();
        let psi = DVector::from_fn(dim, |i, _| {
            Complex64::from_polar(norm, dot(&kv, &lattice.sites()[sites[slot_of[i]]].local))
        });
        let hpsi = &h * &psi;
        let e = psi.dotc(&hpsi).re;
        let residual = (&hpsi - &psi * Complex64::new(e, 0.0)).norm();
        if residual > 1e-9 * scale {
            return Err(Error::NotTranslationInvariant {
                sample: sample + 1,
                i: 0,
                j: 0,
                deviation: residual,
            });
        }
        labelled.push(e);
        out.push((k, e - e_ref));
    }
    labelled.sort_by(f64::total_cmp);
    let mismatch = labelled
        .iter()
        .zip(&eigen)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if mismatch > 1e-9 * scale {
        return Err(Error::Precondition(format!(
            "plane-wave labels do not reproduce the sector spectrum (mismatch {mismatch:e})"
        )));
    }
    Ok(out)
}

/// Spectrum CSV: `index,energy,degeneracy,k`. Degeneracy groups values
/// within `1e-9`.
pub fn spectrum_csv(values: &[f64], labels: Option<&[String]>) -> String {
    let mut out = String::from("index,energy,degeneracy,k\n");
    for (i, e) in values.iter().enumerate() {
        let deg = values.iter().filter(|x| (*x - e).abs() <= 1e-9).count();
        let label = labels.and_then(|l| l.get(i)).map(String::as_str).unwrap_or("");
        out.push_str(&format!("{i},{e:.16e},{deg},{label}\n"));
    }
    out
}
