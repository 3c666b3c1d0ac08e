//! Real-space exchange and dipolar couplings, and their plane-wave sums.

use std::collections::{BTreeSet, HashMap};

use nalgebra::Matrix3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{dot, norm, LatticeSpec, Vec3, WaveVector};

pub type Tensor = Matrix3<f64>;
pub type ComplexTensor = Matrix3<Complex64>;

const AXES: [&str; 3] = ["x", "y", "z"];

/// How exchange constants are assigned to a set of site pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ExchangeModel {
    None,
    /// Every pair in the set gets the same constant.
    Uniform(f64),
    /// Pairs at the smallest distance occurring in the set get the constant.
    NearestNeighbor(f64),
    /// Global site indices `(i, j, J)`. A pair given once is mirrored; a
    /// pair given in both orders must agree.
    Explicit(Vec<(usize, usize, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTable {
    n_sites: usize,
    exchange: Vec<f64>,
    dipole: Option<Vec<Tensor>>,
}

impl CouplingTable {
    pub fn zeros(n_sites: usize) -> Self {
        Self {
            n_sites,
            exchange: vec![0.0; n_sites * n_sites],
            dipole: None,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn exchange(&self, i: usize, j: usize) -> f64 {
        self.exchange[i * self.n_sites + j]
    }

    pub fn dipole(&self, i: usize, j: usize) -> Tensor {
        match &self.dipole {
            Some(d) => d[i * self.n_sites + j],
            None => Tensor::zeros(),
        }
    }

    pub fn has_dipole(&self) -> bool {
        self.dipole.is_some()
    }

    /// Combined coupling tensor `J delta + D` of a pair.
    pub fn tensor(&self, i: usize, j: usize) -> Tensor {
        self.dipole(i, j) + Tensor::identity() * self.exchange(i, j)
    }

    pub fn set_exchange(&mut self, i: usize, j: usize, value: f64) {
        let n = self.n_sites;
        self.exchange[i * n + j] = value;
        self.exchange[j * n + i] = value;
    }

    /// Replaces the dipolar tensor of a pair (both orders).
    pub fn set_dipole(&mut self, i: usize, j: usize, tensor: Tensor) -> Result<()> {
        if i == j {
            return Err(Error::Config(format!("dipole override on diagonal site {i}")));
        }
        let asym = (tensor - tensor.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(Error::Config(format!(
                "dipole override for ({i}, {j}) is not a symmetric tensor"
            )));
        }
        let n = self.n_sites;
        let d = self
            .dipole
            .get_or_insert_with(|| vec![Tensor::zeros(); n * n]);
        d[i * n + j] = tensor;
        d[j * n + i] = tensor;
        Ok(())
    }
}

/// Point-dipole tensor `d (3 n n^T - 1) / r^3` for displacement `r`.
pub fn point_dipole(strength: f64, r: &Vec3) -> Tensor {
    let len = norm(r);
    let n = nalgebra::Vector3::new(r[0] / len, r[1] / len, r[2] / len);
    (n * n.transpose() * 3.0 - Tensor::identity()) * (strength / (len * len * len))
}

fn assign_exchange(
    lattice: &LatticeSpec,
    table: &mut CouplingTable,
    model: &ExchangeModel,
    pairs: &[(usize, usize)],
    cross: bool,
) -> Result<()> {
    match model {
        ExchangeModel::None => {}
        ExchangeModel::Uniform(j) => {
            for &(a, b) in pairs {
                table.set_exchange(a, b, *j);
            }
        }
        ExchangeModel::NearestNeighbor(j) => {
            let dist: Vec<f64> = pairs.iter().map(|&(a, b)| lattice.distance(a, b)).collect();
            let min = dist.iter().cloned().fold(f64::INFINITY, f64::min);
            for (&(a, b), d) in pairs.iter().zip(&dist) {
                if (d - min).abs() <= 1e-9 * min.max(1.0) {
                    table.set_exchange(a, b, *j);
                }
            }
        }
        ExchangeModel::Explicit(entries) => {
            let mut given: HashMap<(usize, usize), f64> = HashMap::new();
            for &(a, b, j) in entries {
                if a >= table.n_sites || b >= table.n_sites || a == b {
                    return Err(Error::Config(format!("invalid explicit pair ({a}, {b})")));
                }
                let same = lattice.sites()[a].sample == lattice.sites()[b].sample;
                if same == cross {
                    return Err(Error::Config(format!(
                        "explicit pair ({a}, {b}) belongs to the wrong coupling table ({})",
                        if cross { "cross" } else { "intra" }
                    )));
                }
                if let Some(&back) = given.get(&(b, a)) {
                    if (back - j).abs() > 1e-12 * back.abs().max(j.abs()).max(1.0) {
                        return Err(Error::AsymmetricTable {
                            i: a,
                            j: b,
                            forward: j,
                            backward: back,
                        });
                    }
                }
                given.insert((a, b), j);
            }
            for ((a, b), j) in given {
                table.set_exchange(a, b, j);
            }
        }
    }
    Ok(())
}

/// Builds the full coupling table for both samples and the inter-sample link.
///
/// Dipolar tensors come from the point-dipole formula with minimum-image
/// displacements (averaged over tied images) whenever `dipole_strength > 0`.
pub fn build_couplings(
    lattice: &LatticeSpec,
    exchange: &ExchangeModel,
    cross_exchange: &ExchangeModel,
    dipole_strength: f64,
) -> Result<CouplingTable> {
    if !(dipole_strength >= 0.0) || !dipole_strength.is_finite() {
        return Err(Error::Config(format!(
            "dipole strength must be finite and >= 0, got {dipole_strength}"
        )));
    }
    let n_sites = lattice.n_sites();
    let mut table = CouplingTable::zeros(n_sites);

    let mut intra = [Vec::new(), Vec::new()];
    let mut cross = Vec::new();
    for a in 0..n_sites {
        for b in a + 1..n_sites {
            let (ma, mb) = (lattice.sites()[a].sample, lattice.sites()[b].sample);
            if ma == mb {
                intra[ma].push((a, b));
            } else {
                cross.push((a, b));
            }
        }
    }
    for pairs in &intra {
        assign_exchange(lattice, &mut table, exchange, pairs, false)?;
    }
    assign_exchange(lattice, &mut table, cross_exchange, &cross, true)?;

    if dipole_strength > 0.0 {
        let mut d = vec![Tensor::zeros(); n_sites * n_sites];
        for a in 0..n_sites {
            for b in a + 1..n_sites {
                let images = lattice.displacement_images(a, b);
                let mut t = Tensor::zeros();
                for r in &images {
                    if norm(r) < 1e-12 {
                        return Err(Error::DuplicateSite {
                            sample: lattice.sites()[a].sample + 1,
                            position: lattice.sites()[a].position,
                        });
                    }
                    t += point_dipole(dipole_strength, r);
                }
                t /= images.len() as f64;
                d[a * n_sites + b] = t;
                d[b * n_sites + a] = t;
            }
        }
        table.dipole = Some(d);
    }
    Ok(table)
}

/// Plane-wave sum of a scalar coupling and a tensor coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierEntry {
    pub exchange: Complex64,
    pub dipole: ComplexTensor,
}

impl FourierEntry {
    fn zero() -> Self {
        Self {
            exchange: Complex64::new(0.0, 0.0),
            dipole: ComplexTensor::zeros(),
        }
    }

    /// `J + (Dxx + Dyy) / 2`.
    pub fn transverse(&self) -> Complex64 {
        self.exchange + (self.dipole[(0, 0)] + self.dipole[(1, 1)]) * 0.5
    }

    /// `J + Dzz`.
    pub fn longitudinal(&self) -> Complex64 {
        self.exchange + self.dipole[(2, 2)]
    }
}

/// Couplings of one sample seen from its reference site (cell origin),
/// after checking cyclic translation invariance.
struct IntraProfile {
    rows: Vec<(Vec3, f64, Tensor)>,
}

fn intra_profile(table: &CouplingTable, lattice: &LatticeSpec, m: usize) -> Result<IntraProfile> {
    let dims = lattice.dims(m)?;
    let range = lattice.sample_range(m);
    let reference = range.start;
    let scale = 1.0
        + range
            .clone()
            .map(|j| table.exchange(j, reference).abs() + table.dipole(j, reference).abs().max())
            .fold(0.0, f64::max);

    for i in range.clone() {
        let ci = lattice.cell(i).expect("box sample");
        for j in range.clone() {
            if i == j {
                continue;
            }
            let cj = lattice.cell(j).expect("box sample");
            let mut c = [0usize; 3];
            for a in 0..3 {
                c[a] = (ci[a] + dims[a] - cj[a]) % dims[a];
            }
            let s = lattice.site_at(m, c).expect("cell in range");
            let dev = (table.exchange(i, j) - table.exchange(s, reference))
                .abs()
                .max((table.dipole(i, j) - table.dipole(s, reference)).abs().max());
            if dev > 1e-10 * scale {
                return Err(Error::NotTranslationInvariant {
                    sample: m + 1,
                    i,
                    j,
                    deviation: dev,
                });
            }
        }
    }

    let r0 = lattice.sites()[reference].local;
    let rows = range
        .filter(|&s| s != reference)
        .map(|s| {
            let rs = lattice.sites()[s].local;
            (
                [rs[0] - r0[0], rs[1] - r0[1], rs[2] - r0[2]],
                table.exchange(s, reference),
                table.dipole(s, reference),
            )
        })
        .collect();
    Ok(IntraProfile { rows })
}

impl IntraProfile {
    fn transform(&self, k: &Vec3) -> FourierEntry {
        let mut out = FourierEntry::zero();
        for (r, j, d) in &self.rows {
            let phase = Complex64::from_polar(1.0, -dot(k, r));
            out.exchange += phase * *j;
            out.dipole += d.map(|x| phase * x);
        }
        out
    }
}

/// `J_k = sum_{r != 0} J(r) e^{-i k.r}` and the same per tensor component,
/// for sample `m` (0 or 1). Requires translation-invariant couplings.
pub fn fourier_intra(
    table: &CouplingTable,
    lattice: &LatticeSpec,
    sample: usize,
    k: Vec3,
) -> Result<(Complex64, ComplexTensor)> {
    let e = intra_profile(table, lattice, sample)?.transform(&k);
    Ok((e.exchange, e.dipole))
}

/// `(1/N) sum_{j1 j2} X_{j1 j2} e^{-i k1.r_{j1}} e^{-i k2.r_{j2}}` for the
/// exchange and every dipolar component. Positions are measured from each
/// sample's own origin.
pub fn fourier_cross(
    table: &CouplingTable,
    lattice: &LatticeSpec,
    k1: Vec3,
    k2: Vec3,
) -> (Complex64, ComplexTensor) {
    let n = lattice.n_per_sample();
    let mut out = FourierEntry::zero();
    for a in lattice.sample_range(0) {
        let p1 = Complex64::from_polar(1.0, -dot(&k1, &lattice.sites()[a].local));
        for b in lattice.sample_range(1) {
            let p = p1 * Complex64::from_polar(1.0, -dot(&k2, &lattice.sites()[b].local));
            out.exchange += p * table.exchange(a, b);
            if table.has_dipole() {
                out.dipole += table.dipole(a, b).map(|x| p * x);
            }
        }
    }
    let inv = 1.0 / n as f64;
    (out.exchange * inv, out.dipole * Complex64::new(inv, 0.0))
}

/// Plane-wave couplings on the reciprocal grids of both samples.
#[derive(Debug, Clone)]
pub struct FourierTable {
    n: usize,
    grids: [Vec<WaveVector>; 2],
    intra: [HashMap<WaveVector, FourierEntry>; 2],
    cross: HashMap<(WaveVector, WaveVector), FourierEntry>,
}

impl FourierTable {
    /// Intra-sample sums on the whole grid; cross sums on `q1 x q2`.
    pub fn build(
        table: &CouplingTable,
        lattice: &LatticeSpec,
        q1: &[WaveVector],
        q2: &[WaveVector],
    ) -> Result<Self> {
        let grids = [lattice.k_grid(0)?, lattice.k_grid(1)?];
        let mut intra = [HashMap::new(), HashMap::new()];
        for m in 0..2 {
            let profile = intra_profile(table, lattice, m)?;
            intra[m] = grids[m]
                .par_iter()
                .map(|k| (*k, profile.transform(&k.value())))
                .collect();
        }

        let n = lattice.n_per_sample();
        let r1 = lattice.sample_range(0);
        let r2 = lattice.sample_range(1);
        let sites = lattice.sites();
        let has_dipole = table.has_dipole();

        // partial[j1][q2] = sum_{j2} X_{j1 j2} e^{-i q2.r_{j2}}
        let partial: Vec<Vec<FourierEntry>> = r1
            .clone()
            .into_par_iter()
            .map(|a| {
                q2.iter()
                    .map(|k2| {
                        let kv = k2.value();
                        let mut e = FourierEntry::zero();
                        for b in r2.clone() {
                            let p = Complex64::from_polar(1.0, -dot(&kv, &sites[b].local));
                            e.exchange += p * table.exchange(a, b);
                            if has_dipole {
                                e.dipole += table.dipole(a, b).map(|x| p * x);
                            }
                        }
                        e
                    })
                    .collect()
            })
            .collect();

        let inv = 1.0 / n as f64;
        let cross: HashMap<(WaveVector, WaveVector), FourierEntry> = q1
            .par_iter()
            .flat_map_iter(|k1| {
                let kv = k1.value();
                let phases: Vec<Complex64> = r1
                    .clone()
                    .map(|a| Complex64::from_polar(inv, -dot(&kv, &sites[a].local)))
                    .collect();
                let partial = &partial;
                q2.iter().enumerate().map(move |(qi, k2)| {
                    let mut e = FourierEntry::zero();
                    for (row, p) in partial.iter().zip(&phases) {
                        e.exchange += row[qi].exchange * p;
                        if has_dipole {
                            e.dipole += row[qi].dipole * *p;
                        }
                    }
                    ((*k1, *k2), e)
                })
            })
            .collect();

        Ok(Self {
            n,
            grids,
            intra,
            cross,
        })
    }

    /// All cross pairs on the full grids.
    pub fn full(table: &CouplingTable, lattice: &LatticeSpec) -> Result<Self> {
        let (g1, g2) = (lattice.k_grid(0)?, lattice.k_grid(1)?);
        Self::build(table, lattice, &g1, &g2)
    }

    /// Cross sums for every wavevector combination the number-conserving
    /// Hamiltonian restricted to `k1 x k2` can reference: `k`, `-k`,
    /// `k - k'` and `k - k' - k''`.
    pub fn for_modes(
        table: &CouplingTable,
        lattice: &LatticeSpec,
        k1: &[WaveVector],
        k2: &[WaveVector],
    ) -> Result<Self> {
        fn closure(ks: &[WaveVector]) -> Vec<WaveVector> {
            let mut set = BTreeSet::new();
            for a in ks {
                set.insert(*a);
                set.insert(a.neg());
                for b in ks {
                    let d = a.sub(b);
                    set.insert(d);
                    for c in ks {
                        set.insert(d.sub(c));
                    }
                }
            }
            set.into_iter().collect()
        }
        Self::build(table, lattice, &closure(k1), &closure(k2))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self, m: usize) -> &[WaveVector] {
        &self.grids[m]
    }

    pub fn intra(&self, m: usize, k: &WaveVector) -> Result<&FourierEntry> {
        self.intra[m].get(k).ok_or_else(|| Error::MissingFourier {
            key: format!("sample {} k={}", m + 1, k.label()),
            component: "intra".into(),
        })
    }

    pub fn cross(&self, k1: &WaveVector, k2: &WaveVector) -> Result<&FourierEntry> {
        self.cross.get(&(*k1, *k2)).ok_or_else(|| Error::MissingFourier {
            key: format!("k1={} k2={}", k1.label(), k2.label()),
            component: "cross".into(),
        })
    }

    /// Intra-sample table as CSV: `sample,kx,ky,kz,re,im,component`.
    pub fn intra_csv(&self) -> String {
        let mut out = String::from("sample,kx,ky,kz,re,im,component\n");
        for m in 0..2 {
            for k in &self.grids[m] {
                let e = &self.intra[m][k];
                let v = k.value();
                for (name, z) in components(e) {
                    out.push_str(&format!(
                        "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                        m + 1,
                        v[0],
                        v[1],
                        v[2],
                        z.re,
                        z.im,
                        name
                    ));
                }
            }
        }
        out
    }

    /// Cross table as CSV: `k1x,k1y,k1z,k2x,k2y,k2z,re,im,component`.
    pub fn cross_csv(&self) -> String {
        let mut keys: Vec<_> = self.cross.keys().copied().collect();
        keys.sort();
        let mut out = String::from("k1x,k1y,k1z,k2x,k2y,k2z,re,im,component\n");
        for key in keys {
            let e = &self.cross[&key];
            let (a, b) = (key.0.value(), key.1.value());
            for (name, z) in components(e) {
                out.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                    a[0], a[1], a[2], b[0], b[1], b[2], z.re, z.im, name
                ));
            }
        }
        out
    }
}

fn components(e: &FourierEntry) -> Vec<(String, Complex64)> {
    let mut out = vec![("J".to_string(), e.exchange)];
    for a in 0..3 {
        for b in a..3 {
            out.push((format!("D{}{}", AXES[a], AXES[b]), e.dipole[(a, b)]));
        }
    }
    out
}

/// Diagnostics for the symmetry assumptions the bosonic reduction relies on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub max_dzx: f64,
    pub max_dzy: f64,
    pub max_dxy: f64,
    pub max_dxx_minus_dyy: f64,
    pub dxx_equals_dyy: bool,
    /// Largest deviation from cyclic translation invariance over both samples.
    pub max_translation_violation: f64,
    /// `(sample, i, j)` of the worst translation-invariance violation, if any.
    pub worst_pair: Option<(usize, usize, usize)>,
    /// Total S^z commutes with the spin Hamiltonian.
    pub conserves_sz: bool,
}

const SYMMETRY_TOL: f64 = 1e-12;

pub fn symmetry_report(table: &CouplingTable, lattice: &LatticeSpec) -> SymmetryReport {
    symmetry_report_for(table, lattice, None)
}

/// Symmetry report restricted to one sample's pairs (`Some(m)`) or the whole system.
pub fn symmetry_report_for(
    table: &CouplingTable,
    lattice: &LatticeSpec,
    sample: Option<usize>,
) -> SymmetryReport {
    let sites: Vec<usize> = match sample {
        Some(m) => lattice.sample_range(m).collect(),
        None => (0..lattice.n_sites()).collect(),
    };
    let (mut zx, mut zy, mut xy, mut xxyy) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut scale = 0.0f64;
    for &a in &sites {
        for &b in &sites {
            if a == b {
                continue;
            }
            let d = table.dipole(a, b);
            zx = zx.max(d[(2, 0)].abs());
            zy = zy.max(d[(2, 1)].abs());
            xy = xy.max(d[(0, 1)].abs());
            xxyy = xxyy.max((d[(0, 0)] - d[(1, 1)]).abs());
            scale = scale.max(d.abs().max()).max(table.exchange(a, b).abs());
        }
    }
    let tol = SYMMETRY_TOL * scale.max(1.0);

    let mut worst = 0.0;
    let mut worst_pair = None;
    let samples: Vec<usize> = match sample {
        Some(m) => vec![m],
        None => vec![0, 1],
    };
    for m in samples {
        let Ok(dims) = lattice.dims(m) else { continue };
        let range = lattice.sample_range(m);
        let reference = range.start;
        for i in range.clone() {
            let ci = lattice.cell(i).expect("box sample");
            for j in range.clone() {
                if i == j {
                    continue;
                }
                let cj = lattice.cell(j).expect("box sample");
                let mut c = [0usize; 3];
                for a in 0..3 {
                    c[a] = (ci[a] + dims[a] - cj[a]) % dims[a];
                }
                let s = lattice.site_at(m, c).expect("cell in range");
                let dev = (table.exchange(i, j) - table.exchange(s, reference))
                    .abs()
                    .max((table.dipole(i, j) - table.dipole(s, reference)).abs().max());
                if dev > worst {
                    worst = dev;
                    worst_pair = Some((m + 1, i, j));
                }
            }
        }
    }
    let dxx_equals_dyy = xxyy <= tol;
    SymmetryReport {
        max_dzx: zx,
        max_dzy: zy,
        max_dxy: xy,
        max_dxx_minus_dyy: xxyy,
        dxx_equals_dyy,
        max_translation_violation: worst,
        worst_pair: if worst > tol { worst_pair } else { None },
        conserves_sz: dxx_equals_dyy && zx <= tol && zy <= tol && xy <= tol,
    }
}

impl SymmetryReport {
    pub fn sz_violation(&self) -> f64 {
        self.max_dzx
            .max(self.max_dzy)
            .max(self.max_dxy)
            .max(self.max_dxx_minus_dyy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Sample, SampleShape};
    use std::f64::consts::PI;

    fn pair_lattice(sep: Vec3) -> LatticeSpec {
        LatticeSpec::new(
            Sample::new(SampleShape::Custom(vec![[0.0; 3]]), [0.0; 3], 0.5, 0.0),
            Sample::new(SampleShape::Custom(vec![[0.0; 3]]), sep, 0.5, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn dipole_along_z() {
        let lat = pair_lattice([0.0, 0.0, 1.0]);
        let t = build_couplings(&lat, &ExchangeModel::None, &ExchangeModel::None, 1.0).unwrap();
        let d = t.dipole(0, 1);
        assert_eq!(d[(2, 2)], 2.0);
        assert_eq!(d[(0, 0)], -1.0);
        assert_eq!(d[(1, 1)], -1.0);
        assert_eq!(d[(0, 1)], 0.0);
        assert_eq!(d[(0, 2)], 0.0);
    }

    #[test]
    fn dipole_along_x_at_distance_two() {
        let lat = pair_lattice([2.0, 0.0, 0.0]);
        let t = build_couplings(&lat, &ExchangeModel::None, &ExchangeModel::None, 1.0).unwrap();
        let d = t.dipole(1, 0);
        assert!((d[(0, 0)] - 0.25).abs() < 1e-15);
        assert!((d[(1, 1)] + 0.125).abs() < 1e-15);
        assert!((d[(2, 2)] + 0.125).abs() < 1e-15);
    }

    #[test]
    fn zero_dipole_uniform_exchange() {
        let lat = LatticeSpec::rings(4, [0.5; 2], [0.0; 2]).unwrap();
        let t = build_couplings(
            &lat,
            &ExchangeModel::Uniform(1.0),
            &ExchangeModel::Uniform(1.0),
            0.0,
        )
        .unwrap();
        assert!(!t.has_dipole());
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j { 0.0 } else { 1.0 };
                assert_eq!(t.exchange(i, j), want);
                assert_eq!(t.dipole(i, j), Tensor::zeros());
            }
        }
    }

    #[test]
    fn explicit_asymmetric_rejected() {
        let lat = LatticeSpec::rings(3, [0.5; 2], [0.0; 2]).unwrap();
        let err = build_couplings(
            &lat,
            &ExchangeModel::Explicit(vec![(0, 1, 1.0), (1, 0, 2.0)]),
            &ExchangeModel::None,
            0.0,
        );
        assert!(matches!(err, Err(Error::AsymmetricTable { .. })));
        let err = build_couplings(
            &lat,
            &ExchangeModel::None,
            &ExchangeModel::Explicit(vec![(0, 1, 1.0)]),
            0.0,
        );
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn ring_fourier_values() {
        let lat = LatticeSpec::rings(4, [0.5; 2], [0.0; 2]).unwrap();
        let t = build_couplings(&lat, &ExchangeModel::NearestNeighbor(1.0), &ExchangeModel::None, 0.0)
            .unwrap();
        let (j0, _) = fourier_intra(&t, &lat, 0, [0.0; 3]).unwrap();
        assert!((j0 - Complex64::new(2.0, 0.0)).norm() < 1e-15);

        let lat = LatticeSpec::rings(6, [0.5; 2], [0.0; 2]).unwrap();
        let t = build_couplings(&lat, &ExchangeModel::NearestNeighbor(1.0), &ExchangeModel::None, 0.0)
            .unwrap();
        // direct sum over the two neighbour displacements +-1
        let k = 2.0 * PI / 6.0;
        let direct = Complex64::from_polar(1.0, -k) + Complex64::from_polar(1.0, k);
        let (jk, _) = fourier_intra(&t, &lat, 1, [k, 0.0, 0.0]).unwrap();
        assert!((jk - direct).norm() < 1e-14);
        assert!((jk.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn all_to_all_at_zone_boundary() {
        let lat = LatticeSpec::rings(4, [0.5; 2], [0.0; 2]).unwrap();
        let t = build_couplings(&lat, &ExchangeModel::Uniform(1.0), &ExchangeModel::None, 0.0).unwrap();
        // displacements 1, 2, 3: e^{-i pi} + e^{-2 i pi} + e^{-3 i pi} = -1
        let (jk, _) = fourier_intra(&t, &lat, 0, [PI, 0.0, 0.0]).unwrap();
        assert!((jk - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cross_single_bond() {
        let lat = LatticeSpec::new(
            Sample::new(SampleShape::Custom(vec![[0.0; 3], [1.0, 0.0, 0.0]]), [0.0; 3], 0.5, 0.0),
            Sample::new(
                SampleShape::Custom(vec![[0.0; 3], [1.0, 0.0, 0.0]]),
                [0.0, 0.0, 1.0],
                0.5,
                0.0,
            ),
        )
        .unwrap();
        let zero = build_couplings(&lat, &ExchangeModel::None, &ExchangeModel::None, 0.0).unwrap();
        assert_eq!(fourier_cross(&zero, &lat, [0.3; 3], [0.1; 3]).0, Complex64::new(0.0, 0.0));
        let t = build_couplings(
            &lat,
            &ExchangeModel::None,
            &ExchangeModel::Explicit(vec![(0, 2, 1.0)]),
            0.0,
        )
        .unwrap();
        let (j, _) = fourier_cross(&t, &lat, [0.0; 3], [0.0; 3]);
        assert!((j - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn translation_violation_reported() {
        let lat = LatticeSpec::rings(4, [0.5; 2], [0.0; 2]).unwrap();
        let t = build_couplings(
            &lat,
            &ExchangeModel::Explicit(vec![(0, 1, 1.0), (1, 2, 1.0)]),
            &ExchangeModel::None,
            0.0,
        )
        .unwrap();
        let rep = symmetry_report(&t, &lat);
        assert!(rep.max_translation_violation > 0.5);
        assert!(rep.worst_pair.is_some());
        let err = fourier_intra(&t, &lat, 0, [0.0; 3]);
        assert!(matches!(err, Err(Error::NotTranslationInvariant { sample: 1, .. })));
    }

    #[test]
    fn axial_pairs_are_symmetric() {
        let lat = pair_lattice([0.0, 0.0, 1.5]);
        let t = build_couplings(&lat, &ExchangeModel::None, &ExchangeModel::None, 1.0).unwrap();
        let rep = symmetry_report(&t, &lat);
        assert_eq!(rep.max_dzx, 0.0);
        assert_eq!(rep.max_dzy, 0.0);
        assert_eq!(rep.max_dxy, 0.0);
        assert!(rep.dxx_equals_dyy && rep.conserves_sz);
    }

    #[test]
    fn oblique_pair_flagged() {
        let s = 1.0 / 2f64.sqrt();
        let lat = pair_lattice([s, 0.0, s]);
        let t = build_couplings(&lat, &ExchangeModel::None, &ExchangeModel::None, 1.0).unwrap();
        let rep = symmetry_report(&t, &lat);
        assert!((rep.max_dzx - 1.5).abs() < 1e-14);
        assert!(!rep.conserves_sz);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let lat = LatticeSpec::rings(3, [0.5; 2], [0.0; 2]).unwrap();
        let t = build_couplings(&lat, &ExchangeModel::NearestNeighbor(1.0), &ExchangeModel::None, 0.5)
            .unwrap();
        let f = FourierTable::full(&t, &lat).unwrap();
        let csv = f.intra_csv();
        assert!(csv.starts_with("sample,kx,ky,kz,re,im,component\n"));
        assert_eq!(csv.lines().count(), 1 + 2 * 3 * 7);
        assert_eq!(f.cross_csv().lines().count(), 1 + 9 * 7);
    }
}
