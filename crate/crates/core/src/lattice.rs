//! Two-sample lattice geometry.
//!
//! Sites are stored sample by sample: indices `0..N` belong to the first
//! sample and `N..2N` to the second. Lattice constant is 1 and all positions
//! are in lattice units.

use std::f64::consts::PI;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Site arrangement within one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SampleShape {
    /// Rectangular block of `dims` unit cells, optionally periodic per axis.
    Box { dims: [usize; 3], periodic: [bool; 3] },
    /// Arbitrary positions (relative to the sample origin). No plane-wave basis.
    Custom(Vec<Vec3>),
}

impl SampleShape {
    pub fn ring(n: usize) -> Self {
        SampleShape::Box {
            dims: [n, 1, 1],
            periodic: [true, true, true],
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SampleShape::Box { dims, .. } => dims.iter().product(),
            SampleShape::Custom(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub shape: SampleShape,
    pub origin: Vec3,
    /// Spin magnitude S (half-integer, at least 1/2).
    pub spin: f64,
    /// Longitudinal field h (energy units).
    pub field: f64,
}

impl Sample {
    pub fn new(shape: SampleShape, origin: Vec3, spin: f64, field: f64) -> Self {
        Self {
            shape,
            origin,
            spin,
            field,
        }
    }

    fn local_positions(&self) -> Vec<Vec3> {
        match &self.shape {
            SampleShape::Box { dims, .. } => {
                let mut out = Vec::with_capacity(self.shape.len());
                for z in 0..dims[2] {
                    for y in 0..dims[1] {
                        for x in 0..dims[0] {
                            out.push([x as f64, y as f64, z as f64]);
                        }
                    }
                }
                out
            }
            SampleShape::Custom(p) => p.clone(),
        }
    }

    pub fn dims(&self) -> Option<[usize; 3]> {
        match &self.shape {
            SampleShape::Box { dims, .. } => Some(*dims),
            SampleShape::Custom(_) => None,
        }
    }

    fn periodic(&self) -> [bool; 3] {
        match &self.shape {
            SampleShape::Box { periodic, dims } => {
                [periodic[0] && dims[0] > 1, periodic[1] && dims[1] > 1, periodic[2] && dims[2] > 1]
            }
            SampleShape::Custom(_) => [false; 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    /// 0 for the first sample, 1 for the second.
    pub sample: usize,
    pub position: Vec3,
    /// Position relative to the sample origin; the phase reference for plane waves.
    pub local: Vec3,
}

/// A discrete wavevector on the reciprocal grid of a box-shaped sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WaveVector {
    pub index: [usize; 3],
    pub dims: [usize; 3],
}

impl WaveVector {
    pub fn new(index: [usize; 3], dims: [usize; 3]) -> Self {
        let mut index = index;
        for a in 0..3 {
            index[a] %= dims[a];
        }
        Self { index, dims }
    }

    pub fn zero(dims: [usize; 3]) -> Self {
        Self {
            index: [0; 3],
            dims,
        }
    }

    /// Builds a wavevector from signed grid indices.
    pub fn from_signed(index: [i64; 3], dims: [usize; 3]) -> Self {
        let mut out = [0usize; 3];
        for a in 0..3 {
            out[a] = index[a].rem_euclid(dims[a] as i64) as usize;
        }
        Self { index: out, dims }
    }

    /// Components folded into the first zone, `(-pi, pi]`.
    pub fn value(&self) -> Vec3 {
        let mut v = [0.0; 3];
        for a in 0..3 {
            let l = self.dims[a] as i64;
            let mut n = self.index[a] as i64;
            if 2 * n > l {
                n -= l;
            }
            v[a] = 2.0 * PI * n as f64 / l as f64;
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.index == [0; 3]
    }

    pub fn neg(&self) -> Self {
        let mut i = [0; 3];
        for a in 0..3 {
            i[a] = (self.dims[a] - self.index[a]) % self.dims[a];
        }
        Self {
            index: i,
            dims: self.dims,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dims, other.dims);
        let mut i = [0; 3];
        for a in 0..3 {
            i[a] = (self.index[a] + other.index[a]) % self.dims[a];
        }
        Self {
            index: i,
            dims: self.dims,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn label(&self) -> String {
        format!("({},{},{})", self.index[0], self.index[1], self.index[2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    samples: [Sample; 2],
    sites: Vec<Site>,
    n: usize,
}

fn is_half_integer_spin(s: f64) -> bool {
    s >= 0.5 && (2.0 * s).fract() == 0.0
}

impl LatticeSpec {
    pub fn new(first: Sample, second: Sample) -> Result<Self> {
        let samples = [first, second];
        for (m, s) in samples.iter().enumerate() {
            if !is_half_integer_spin(s.spin) {
                return Err(Error::Config(format!(
                    "sample {}: spin {} is not a half-integer >= 1/2",
                    m + 1,
                    s.spin
                )));
            }
            if !s.field.is_finite() {
                return Err(Error::Config(format!("sample {}: field is not finite", m + 1)));
            }
            if s.shape.is_empty() {
                return Err(Error::Config(format!("sample {} has no sites", m + 1)));
            }
        }
        let n = samples[0].shape.len();
        if samples[1].shape.len() != n {
            return Err(Error::Config(format!(
                "samples must have equal size, got {} and {}",
                n,
                samples[1].shape.len()
            )));
        }

        let mut sites = Vec::with_capacity(2 * n);
        for (m, s) in samples.iter().enumerate() {
            let local = s.local_positions();
            for (a, p) in local.iter().enumerate() {
                for q in &local[..a] {
                    if p == q {
                        return Err(Error::DuplicateSite {
                            sample: m + 1,
                            position: *p,
                        });
                    }
                }
            }
            for p in local {
                sites.push(Site {
                    sample: m,
                    position: [p[0] + s.origin[0], p[1] + s.origin[1], p[2] + s.origin[2]],
                    local: p,
                });
            }
        }
        Ok(Self { samples, sites, n })
    }

    /// Two periodic rings of `n` sites, the second displaced by one unit along z.
    pub fn rings(n: usize, spins: [f64; 2], fields: [f64; 2]) -> Result<Self> {
        Self::new(
            Sample::new(SampleShape::ring(n), [0.0; 3], spins[0], fields[0]),
            Sample::new(SampleShape::ring(n), [0.0, 0.0, 1.0], spins[1], fields[1]),
        )
    }

    /// Two identical boxes stacked along z with the given gap between their origins.
    pub fn boxes(
        dims: [usize; 3],
        periodic: [bool; 3],
        separation: f64,
        spins: [f64; 2],
        fields: [f64; 2],
    ) -> Result<Self> {
        let shape = SampleShape::Box { dims, periodic };
        let offset = separation + (dims[2] as f64 - 1.0);
        Self::new(
            Sample::new(shape.clone(), [0.0; 3], spins[0], fields[0]),
            Sample::new(shape, [0.0, 0.0, offset], spins[1], fields[1]),
        )
    }

    /// Two monolayer films, periodic in plane, separated along z.
    pub fn film_pair(
        lx: usize,
        ly: usize,
        separation: f64,
        spins: [f64; 2],
        fields: [f64; 2],
    ) -> Result<Self> {
        Self::boxes([lx, ly, 1], [true, true, false], separation, spins, fields)
    }

    pub fn n_per_sample(&self) -> usize {
        self.n
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn sample(&self, m: usize) -> &Sample {
        &self.samples[m]
    }

    pub fn spin(&self, m: usize) -> f64 {
        self.samples[m].spin
    }

    pub fn field(&self, m: usize) -> f64 {
        self.samples[m].field
    }

    pub fn sample_range(&self, m: usize) -> Range<usize> {
        m * self.n..(m + 1) * self.n
    }

    pub fn site_spin(&self, i: usize) -> f64 {
        self.samples[self.sites[i].sample].spin
    }

    /// Returns a copy with different fields.
    pub fn with_fields(&self, fields: [f64; 2]) -> Self {
        let mut out = self.clone();
        out.samples[0].field = fields[0];
        out.samples[1].field = fields[1];
        out
    }

    pub fn dims(&self, m: usize) -> Result<[usize; 3]> {
        self.samples[m].dims().ok_or_else(|| {
            Error::Config(format!(
                "sample {} has custom positions and no reciprocal grid",
                m + 1
            ))
        })
    }

    /// All wavevectors of the plane-wave basis of sample `m`.
    pub fn k_grid(&self, m: usize) -> Result<Vec<WaveVector>> {
        let dims = self.dims(m)?;
        let mut out = Vec::with_capacity(self.n);
        for z in 0..dims[2] {
            for y in 0..dims[1] {
                for x in 0..dims[0] {
                    out.push(WaveVector::new([x, y, z], dims));
                }
            }
        }
        Ok(out)
    }

    /// Integer cell coordinates of a site in a box sample.
    pub fn cell(&self, i: usize) -> Option<[usize; 3]> {
        let s = &self.sites[i];
        self.samples[s.sample].dims().map(|_| {
            [
                s.local[0].round() as usize,
                s.local[1].round() as usize,
                s.local[2].round() as usize,
            ]
        })
    }

    /// Site index of a cell in box sample `m`.
    pub fn site_at(&self, m: usize, cell: [usize; 3]) -> Option<usize> {
        let dims = self.samples[m].dims()?;
        if (0..3).any(|a| cell[a] >= dims[a]) {
            return None;
        }
        Some(m * self.n + cell[0] + dims[0] * (cell[1] + dims[1] * cell[2]))
    }

    fn shared_periodic(&self, i: usize, j: usize) -> ([bool; 3], [usize; 3]) {
        let (mi, mj) = (self.sites[i].sample, self.sites[j].sample);
        let (a, b) = (&self.samples[mi], &self.samples[mj]);
        let (pa, pb) = (a.periodic(), b.periodic());
        match (a.dims(), b.dims()) {
            (Some(da), Some(db)) => {
                let mut p = [false; 3];
                for ax in 0..3 {
                    p[ax] = pa[ax] && pb[ax] && da[ax] == db[ax];
                }
                (p, da)
            }
            _ => ([false; 3], [1; 3]),
        }
    }

    /// Displacement `r_i - r_j` under the minimum-image convention on the
    /// periodic axes. When an axis sits exactly at half the period both
    /// images are returned, so the list has between 1 and 8 entries.
    pub fn displacement_images(&self, i: usize, j: usize) -> Vec<Vec3> {
        let (pi, pj) = (self.sites[i].position, self.sites[j].position);
        let (periodic, dims) = self.shared_periodic(i, j);
        let mut images: Vec<Vec3> = vec![[0.0; 3]];
        for a in 0..3 {
            let mut d = pi[a] - pj[a];
            let mut choices = vec![d];
            if periodic[a] {
                let l = dims[a] as f64;
                d -= l * (d / l).round();
                if (d.abs() - l / 2.0).abs() < 1e-12 {
                    choices = vec![l / 2.0, -l / 2.0];
                } else {
                    choices = vec![d];
                }
            }
            let mut next = Vec::with_capacity(images.len() * choices.len());
            for img in &images {
                for &c in &choices {
                    let mut v = *img;
                    v[a] = c;
                    next.push(v);
                }
            }
            images = next;
        }
        images
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        norm(&self.displacement_images(i, j)[0])
    }
}

pub fn norm(v: &Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unequal_samples() {
        let err = LatticeSpec::new(
            Sample::new(SampleShape::ring(4), [0.0; 3], 0.5, 0.0),
            Sample::new(SampleShape::ring(3), [0.0; 3], 0.5, 0.0),
        );
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn rejects_bad_spin() {
        assert!(LatticeSpec::rings(4, [0.7, 0.5], [0.0; 2]).is_err());
        assert!(LatticeSpec::rings(4, [0.0, 0.5], [0.0; 2]).is_err());
        assert!(LatticeSpec::rings(4, [1.5, 2.0], [0.0; 2]).is_ok());
    }

    #[test]
    fn rejects_duplicate_positions() {
        let err = LatticeSpec::new(
            Sample::new(
                SampleShape::Custom(vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0; 3]]),
                [0.0; 3],
                0.5,
                0.0,
            ),
            Sample::new(SampleShape::ring(3), [0.0, 0.0, 1.0], 0.5, 0.0),
        );
        assert!(matches!(err, Err(Error::DuplicateSite { sample: 1, .. })));
    }

    #[test]
    fn minimum_image_ties_give_both_images() {
        let lat = LatticeSpec::rings(4, [0.5; 2], [0.0; 2]).unwrap();
        let imgs = lat.displacement_images(2, 0);
        assert_eq!(imgs.len(), 2);
        assert_eq!(lat.displacement_images(1, 0), vec![[1.0, 0.0, 0.0]]);
        assert_eq!(lat.displacement_images(3, 0), vec![[-1.0, 0.0, 0.0]]);
    }

    #[test]
    fn wavevector_arithmetic_wraps() {
        let d = [6, 1, 1];
        let k = WaveVector::new([5, 0, 0], d);
        assert_eq!(k.neg().index, [1, 0, 0]);
        assert!(k.add(&k.neg()).is_zero());
        assert!((k.value()[0] + PI / 3.0).abs() < 1e-15);
        assert_eq!(WaveVector::from_signed([-2, 0, 0], d).index, [4, 0, 0]);
    }

    #[test]
    fn film_pair_layout() {
        let lat = LatticeSpec::film_pair(3, 2, 1.0, [0.5; 2], [0.0; 2]).unwrap();
        assert_eq!(lat.n_per_sample(), 6);
        assert_eq!(lat.sites()[6].position, [0.0, 0.0, 1.0]);
        assert_eq!(lat.site_at(1, [2, 1, 0]), Some(11));
        assert_eq!(lat.cell(11), Some([2, 1, 0]));
        assert_eq!(lat.k_grid(1).unwrap().len(), 6);
    }
}
