//! Number-conserving magnon Hamiltonian in plane-wave modes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::ops::{BosonTermSum, Mode, Op};
use crate::couplings::FourierTable;
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, WaveVector};

/// Coefficients of the plane-wave Hamiltonian restricted to chosen modes.
///
/// Operator conventions (sample index first, then wavevector):
/// * `a_intra[(m, k)]`: `b+_{m,k} b_{m,k}`
/// * `mean_field[(m, k, k')]`, `k != k'`: `b+_{m,k} b_{m,k'}` from the
///   longitudinal field of the other sample
/// * `a_cross[(k1, k2)]`: `b+_{1,k1} b_{2,k2}` (Hermitian partner added)
/// * `intra_quartic[(m, [k1,k2,k3,k4])]`: `b+_{m,k1} b+_{m,k2} b_{m,k3} b_{m,k4}`
/// * `c[[k1, k1', k2, k2']]`: `b+_{1,k1} b+_{2,k2} b_{2,k2'} b_{1,k1'}`
/// * `c_prime[(0, [k1,k2,k2',k2''])]`: `b+_{1,k1} b+_{2,k2} b_{2,k2'} b_{2,k2''}`
/// * `c_prime[(1, [k2,k1,k1',k1''])]`: `b+_{2,k2} b+_{1,k1} b_{1,k1'} b_{1,k1''}`
///
/// `c_prime` terms also carry their Hermitian partner.
#[derive(Debug, Clone)]
pub struct KSpaceHamiltonian {
    pub n: usize,
    pub spins: [f64; 2],
    pub modes: [Vec<WaveVector>; 2],
    pub a_intra: BTreeMap<(usize, WaveVector), f64>,
    pub mean_field: BTreeMap<(usize, WaveVector, WaveVector), Complex64>,
    pub a_cross: BTreeMap<(WaveVector, WaveVector), Complex64>,
    pub intra_quartic: BTreeMap<(usize, [WaveVector; 4]), Complex64>,
    pub c: BTreeMap<[WaveVector; 4], Complex64>,
    pub c_prime: BTreeMap<(usize, [WaveVector; 4]), Complex64>,
}

fn wave(sample: usize, k: WaveVector) -> Mode {
    Mode::Wave { sample, k }
}

fn cr(sample: usize, k: WaveVector) -> Op {
    Op::create(wave(sample, k))
}

fn an(sample: usize, k: WaveVector) -> Op {
    Op::annihilate(wave(sample, k))
}

/// Quadratic coefficient `A_m(k)` of `b+_{m,k} b_{m,k}`: Zeeman term, exchange
/// and dipolar dispersion, and the longitudinal mean field of the other
/// sample. Needs the intra sums at `0` and `k` and the cross sum at `(0, 0)`.
pub fn magnon_energy(fourier: &FourierTable, lattice: &LatticeSpec, m: usize, k: &WaveVector) -> Result<f64> {
    let zero = [
        WaveVector::zero(fourier.grid(0)[0].dims),
        WaveVector::zero(fourier.grid(1)[0].dims),
    ];
    let f0 = fourier.intra(m, &zero[m])?;
    let fk = fourier.intra(m, k)?;
    let static_part = f0.exchange.re + f0.dipole[(2, 2)].re;
    let mean = fourier.cross(&zero[0], &zero[1])?.longitudinal().re * lattice.spin(1 - m);
    Ok(lattice.field(m) + lattice.spin(m) * (static_part - fk.transverse().re) + mean)
}

/// Computes every coefficient among the retained modes `k_sets[m]` of each
/// sample. `fourier` must contain the cross sums these modes reference
/// (see `FourierTable::for_modes`).
pub fn kspace_coefficients(
    fourier: &FourierTable,
    lattice: &LatticeSpec,
    k_sets: [&[WaveVector]; 2],
) -> Result<KSpaceHamiltonian> {
    let n = fourier.n();
    let inv_n = 1.0 / n as f64;
    let spins = [lattice.spin(0), lattice.spin(1)];
    let root = (spins[0] * spins[1]).sqrt();
    for m in 0..2 {
        for k in k_sets[m] {
            if !fourier.grid(m).contains(k) {
                return Err(Error::Config(format!(
                    "wavevector {} is not on the grid of sample {}",
                    k.label(),
                    m + 1
                )));
            }
        }
    }
    let zero = [
        WaveVector::zero(fourier.grid(0)[0].dims),
        WaveVector::zero(fourier.grid(1)[0].dims),
    ];
    let mut h = KSpaceHamiltonian {
        n,
        spins,
        modes: [k_sets[0].to_vec(), k_sets[1].to_vec()],
        a_intra: BTreeMap::new(),
        mean_field: BTreeMap::new(),
        a_cross: BTreeMap::new(),
        intra_quartic: BTreeMap::new(),
        c: BTreeMap::new(),
        c_prime: BTreeMap::new(),
    };

    // quadratic, same sample
    for m in 0..2 {
        let other = 1 - m;
        for &k in k_sets[m] {
            h.a_intra.insert((m, k), magnon_energy(fourier, lattice, m, &k)?);
            for &kp in k_sets[m] {
                if k == kp {
                    continue;
                }
                let q = k.sub(&kp);
                let z = if m == 0 {
                    fourier.cross(&q, &zero[1])?.longitudinal()
                } else {
                    fourier.cross(&zero[0], &q)?.longitudinal()
                };
                h.mean_field.insert((m, k, kp), z * spins[other]);
            }
        }
    }

    // quadratic, cross
    for &k1 in k_sets[0] {
        for &k2 in k_sets[1] {
            let t = fourier.cross(&k1, &k2.neg())?.transverse();
            h.a_cross.insert((k1, k2), -t * root);
        }
    }

    // quartic, same sample, momentum conserving
    for m in 0..2 {
        let set = k_sets[m];
        for &k1 in set {
            for &k2 in set {
                let total = k1.add(&k2);
                for &k3 in set {
                    let k4 = total.sub(&k3);
                    if !set.contains(&k4) {
                        continue;
                    }
                    let z = fourier.intra(m, &k1.sub(&k4))?.longitudinal();
                    let t1 = fourier.intra(m, &k1)?.transverse();
                    let t4 = fourier.intra(m, &k4)?.transverse();
                    let v = (z * -0.5 + (t1 + t4) * 0.25) * inv_n;
                    h.intra_quartic.insert((m, [k1, k2, k3, k4]), v);
                }
            }
        }
    }

    // quartic, cross
    let (s1, s2) = (k_sets[0], k_sets[1]);
    for &k1 in s1 {
        for &k1p in s1 {
            for &k2 in s2 {
                for &k2p in s2 {
                    let z = fourier.cross(&k1.sub(&k1p), &k2.sub(&k2p))?.longitudinal();
                    h.c.insert([k1, k1p, k2, k2p], -z * inv_n);
                }
            }
        }
    }
    let c2 = root / (4.0 * spins[1]) * inv_n;
    for &k1 in s1 {
        for &k2 in s2 {
            for &k2p in s2 {
                for &k2pp in s2 {
                    let t = fourier.cross(&k1, &k2.sub(&k2p).sub(&k2pp))?.transverse();
                    h.c_prime.insert((0, [k1, k2, k2p, k2pp]), t * c2);
                }
            }
        }
    }
    let c1 = root / (4.0 * spins[0]) * inv_n;
    for &k2 in s2 {
        for &k1 in s1 {
            for &k1p in s1 {
                for &k1pp in s1 {
                    let t = fourier.cross(&k1.sub(&k1p).sub(&k1pp), &k2)?.transverse();
                    h.c_prime.insert((1, [k2, k1, k1p, k1pp]), t * c1);
                }
            }
        }
    }
    Ok(h)
}

impl KSpaceHamiltonian {
    /// Symbolic operator assembled from the coefficient tables.
    pub fn terms(&self) -> BosonTermSum {
        let zero = Complex64::new(0.0, 0.0);
        let mut out = BosonTermSum::new();
        for (&(m, k), &a) in &self.a_intra {
            if a != 0.0 {
                out.push_real(a, vec![cr(m, k), an(m, k)]);
            }
        }
        for (&(m, k, kp), &v) in &self.mean_field {
            if v != zero {
                out.push(v, vec![cr(m, k), an(m, kp)]);
            }
        }
        for (&(k1, k2), &v) in &self.a_cross {
            if v != zero {
                out.push_with_adjoint(v, vec![cr(0, k1), an(1, k2)]);
            }
        }
        for (&(m, ks), &v) in &self.intra_quartic {
            if v != zero {
                out.push(v, vec![cr(m, ks[0]), cr(m, ks[1]), an(m, ks[2]), an(m, ks[3])]);
            }
        }
        for (&[k1, k1p, k2, k2p], &v) in &self.c {
            if v != zero {
                out.push(v, vec![cr(0, k1), cr(1, k2), an(1, k2p), an(0, k1p)]);
            }
        }
        for (&(family, ks), &v) in &self.c_prime {
            if v == zero {
                continue;
            }
            let (a, b) = if family == 0 { (0, 1) } else { (1, 0) };
            out.push_with_adjoint(v, vec![cr(a, ks[0]), cr(b, ks[1]), an(b, ks[2]), an(b, ks[3])]);
        }
        out
    }

    /// Retained modes, sample 1 first.
    pub fn mode_list(&self) -> Vec<Mode> {
        let mut out: Vec<Mode> = self.modes[0].iter().map(|k| wave(0, *k)).collect();
        out.extend(self.modes[1].iter().map(|k| wave(1, *k)));
        out
    }

    /// Coefficients as CSV: `kind,sample,k1,k2,k3,k4,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,sample,k1,k2,k3,k4,re,im\n");
        let dash = "-".to_string();
        let mut row = |kind: &str, sample: usize, ks: &[WaveVector], v: Complex64| {
            let mut labels: Vec<String> = ks.iter().map(|k| format!("\"{}\"", k.label())).collect();
            labels.resize(4, dash.clone());
            let _ = writeln!(
                s,
                "{kind},{},{},{:.16e},{:.16e}",
                sample + 1,
                labels.join(","),
                v.re,
                v.im
            );
        };
        for (&(m, k), &a) in &self.a_intra {
            row("A", m, &[k], Complex64::new(a, 0.0));
        }
        for (&(m, k, kp), &v) in &self.mean_field {
            row("M", m, &[k, kp], v);
        }
        for (&(k1, k2), &v) in &self.a_cross {
            row("Across", 0, &[k1, k2], v);
        }
        for (&(m, ks), &v) in &self.intra_quartic {
            row("Q", m, &ks, v);
        }
        for (ks, &v) in &self.c {
            row("C", 0, ks, v);
        }
        for (&(f, ks), &v) in &self.c_prime {
            row("Cprime", f, &ks, v);
        }
        s
    }
}
