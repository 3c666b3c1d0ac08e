//! Holstein-Primakoff expansion of the spin Hamiltonian to quartic order.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::ops::{BosonTermSum, Mode, Op};
use crate::couplings::{symmetry_report, CouplingTable};
use crate::error::Result;
use crate::lattice::LatticeSpec;

/// Terms that change the magnon number; only produced on request.
#[derive(Debug, Clone, Default, Serialize)]
pub struct NonConserving {
    /// Single-operator terms from `zx`/`zy` couplings.
    pub linear: BosonTermSum,
    /// `b b` and `b+ b+` terms from `xx - yy` and `xy` couplings.
    pub pair: BosonTermSum,
    pub cubic: BosonTermSum,
    pub quartic: BosonTermSum,
}

impl NonConserving {
    pub fn max_coeff(&self) -> f64 {
        [&self.linear, &self.pair, &self.cubic, &self.quartic]
            .iter()
            .map(|s| s.max_coeff())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HpExpansion {
    /// Classical energy of the fully polarized state.
    pub constant: f64,
    /// Coefficient of `b+_i b_j`, both orders stored.
    pub quadratic: BTreeMap<(usize, usize), f64>,
    /// Number-conserving quartic terms.
    pub quartic: BosonTermSum,
    pub nonconserving: Option<NonConserving>,
    /// Largest symmetry-breaking tensor component found in the couplings.
    pub sz_violation: f64,
}

impl HpExpansion {
    /// Quadratic plus quartic number-conserving operator (constant excluded).
    pub fn conserving_terms(&self) -> BosonTermSum {
        let mut out = BosonTermSum::new();
        for (&(i, j), &a) in &self.quadratic {
            if a != 0.0 {
                out.push_real(a, vec![Op::create(Mode::Site(i)), Op::annihilate(Mode::Site(j))]);
            }
        }
        out.extend(self.quartic.clone());
        out
    }

    pub fn quadratic_coeff(&self, i: usize, j: usize) -> f64 {
        self.quadratic.get(&(i, j)).copied().unwrap_or(0.0)
    }
}

fn cr(i: usize) -> Op {
    Op::create(Mode::Site(i))
}

fn an(i: usize) -> Op {
    Op::annihilate(Mode::Site(i))
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Linear and cubic terms of `-(S_i - n_i) (w S+_j + conj(w) S-_j) / 2`.
fn push_longitudinal_transverse(nc: &mut NonConserving, w: Complex64, s_i: f64, s_j: f64, i: usize, j: usize) {
    if w == re(0.0) {
        return;
    }
    let r = (2.0 * s_j).sqrt() / 2.0;
    nc.linear.push_with_adjoint(-w * s_i * r, vec![an(j)]);
    nc.cubic.push_with_adjoint(w * r, vec![cr(i), an(i), an(j)]);
    nc.cubic.push_with_adjoint(w * (s_i * r / (4.0 * s_j)), vec![cr(j), an(j), an(j)]);
}

/// Expands `H = -sum_pairs K^ab S^a_i S^b_j - sum_i h_i S^z_i` about the fully
/// polarized state. Every unordered pair is counted once.
///
/// The diagonal quadratic coefficient of a site collects its Zeeman term
/// and the longitudinal mean field of all partners, including partners in
/// the other sample.
pub fn hp_expand(lattice: &LatticeSpec, table: &CouplingTable, keep_nonconserving: bool) -> Result<HpExpansion> {
    let n = lattice.n_sites();
    let mut constant = 0.0;
    let mut quadratic: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut quartic = BosonTermSum::new();
    let mut nc = NonConserving::default();

    for i in 0..n {
        let h = lattice.field(lattice.sites()[i].sample);
        let s = lattice.site_spin(i);
        constant -= h * s;
        *quadratic.entry((i, i)).or_insert(0.0) += h;
    }

    for i in 0..n {
        for j in (i + 1)..n {
            let k = table.tensor(i, j);
            if k.iter().all(|x| *x == 0.0) {
                continue;
            }
            let (si, sj) = (lattice.site_spin(i), lattice.site_spin(j));
            let z = k[(2, 2)];
            let t = 0.5 * (k[(0, 0)] + k[(1, 1)]);
            let root = (si * sj).sqrt();

            constant -= z * si * sj;
            *quadratic.entry((i, i)).or_insert(0.0) += z * sj;
            *quadratic.entry((j, j)).or_insert(0.0) += z * si;
            if t != 0.0 {
                *quadratic.entry((i, j)).or_insert(0.0) -= t * root;
                *quadratic.entry((j, i)).or_insert(0.0) -= t * root;
            }

            if z != 0.0 {
                quartic.push_real(-z, vec![cr(i), cr(j), an(j), an(i)]);
            }
            if t != 0.0 {
                let cj = t * root / (4.0 * sj);
                quartic.push_real(cj, vec![cr(j), cr(j), an(j), an(i)]);
                quartic.push_real(cj, vec![cr(i), cr(j), an(j), an(j)]);
                let ci = t * root / (4.0 * si);
                quartic.push_real(ci, vec![cr(j), cr(i), an(i), an(i)]);
                quartic.push_real(ci, vec![cr(i), cr(i), an(i), an(j)]);
            }

            if keep_nonconserving {
                // S^z_i (K^zx S^x_j + K^zy S^y_j) and the mirrored partner
                let w_j = Complex64::new(k[(2, 0)], -k[(2, 1)]);
                push_longitudinal_transverse(&mut nc, w_j, si, sj, i, j);
                let w_i = Complex64::new(k[(0, 2)], -k[(1, 2)]);
                push_longitudinal_transverse(&mut nc, w_i, sj, si, j, i);

                // u S+_i S+_j + conj(u) S-_i S-_j
                let p = k[(0, 0)] - k[(1, 1)];
                let q = 0.5 * (k[(0, 1)] + k[(1, 0)]);
                let u = Complex64::new(-p / 4.0, q / 2.0);
                if u != re(0.0) {
                    nc.pair.push_with_adjoint(u * (2.0 * root), vec![an(i), an(j)]);
                    nc.quartic
                        .push_with_adjoint(-u * (2.0 * root / (4.0 * si)), vec![cr(i), an(i), an(i), an(j)]);
                    nc.quartic
                        .push_with_adjoint(-u * (2.0 * root / (4.0 * sj)), vec![cr(j), an(i), an(j), an(j)]);
                }
            }
        }
    }

    let sz_violation = symmetry_report(table, lattice).sz_violation();
    Ok(HpExpansion {
        constant,
        quadratic,
        quartic,
        nonconserving: keep_nonconserving.then_some(nc),
        sz_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::{build_couplings, ExchangeModel};
    use crate::lattice::{Sample, SampleShape};

    fn pair_lattice(spin: f64) -> LatticeSpec {
        let first = Sample::new(SampleShape::Custom(vec![[0.0; 3], [1.0, 0.0, 0.0]]), [0.0; 3], spin, 0.0);
        let second = Sample::new(SampleShape::Custom(vec![[0.0; 3], [1.0, 0.0, 0.0]]), [0.0, 0.0, 50.0], spin, 0.0);
        LatticeSpec::new(first, second).unwrap()
    }

    #[test]
    fn heisenberg_pair_quadratic() {
        let lat = pair_lattice(0.5);
        let table = build_couplings(&lat, &ExchangeModel::Explicit(vec![(0, 1, 1.0)]), &ExchangeModel::None, 0.0).unwrap();
        let hp = hp_expand(&lat, &table, false).unwrap();
        assert_eq!(hp.quadratic_coeff(0, 1), -0.5);
        assert_eq!(hp.quadratic_coeff(1, 0), -0.5);
        assert_eq!(hp.quadratic_coeff(0, 0), 0.5);
        assert_eq!(hp.quadratic_coeff(1, 1), 0.5);
        assert_eq!(hp.constant, -0.25);
    }

    #[test]
    fn zeeman_only() {
        let lat = pair_lattice(1.0).with_fields([0.3, 0.0]);
        let table = CouplingTable::zeros(lat.n_sites());
        let hp = hp_expand(&lat, &table, false).unwrap();
        assert_eq!(hp.quadratic_coeff(0, 0), 0.3);
        assert_eq!(hp.quadratic_coeff(2, 2), 0.0);
        assert!(hp.quartic.is_empty());
        assert!((hp.constant + 0.6).abs() < 1e-15);
    }

    #[test]
    fn conserving_part_is_hermitian() {
        let lat = LatticeSpec::rings(4, [1.0, 0.5], [0.1, 0.2]).unwrap();
        let table = build_couplings(&lat, &ExchangeModel::NearestNeighbor(1.0), &ExchangeModel::Uniform(0.05), 0.2).unwrap();
        let hp = hp_expand(&lat, &table, true).unwrap();
        assert!(hp.conserving_terms().hermiticity_residual() < 1e-13);
        assert!(hp.conserving_terms().is_number_conserving());
        let nc = hp.nonconserving.as_ref().unwrap();
        assert!(nc.max_coeff() > 0.0);
        let mut all = BosonTermSum::new();
        all.extend(nc.linear.clone());
        all.extend(nc.pair.clone());
        all.extend(nc.cubic.clone());
        all.extend(nc.quartic.clone());
        assert!(all.hermiticity_residual() < 1e-13);
    }
}
