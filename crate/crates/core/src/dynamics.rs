//! Unitary dynamics on truncated Fock spaces and the two-level reduction.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::bosonize::{build_fock_matrix, make_fock_space, FockSpace};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix, CVector, SparseMatrix};
use crate::qubit::QubitParams;

/// Largest dimension propagated through a dense eigendecomposition.
pub const DENSE_PROPAGATION_LIMIT: usize = 2000;
const HERMITICITY_TOL: f64 = 1e-10;
const KRYLOV_DIM: usize = 30;

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub amplitudes: Vec<CVector>,
    pub norm_drift: Vec<f64>,
    /// `<psi(t)|H|psi(t)>`.
    pub energy: Vec<f64>,
}

impl Trajectory {
    pub fn population(&self, step: usize, state: usize) -> f64 {
        self.amplitudes[step][state].norm_sqr()
    }

    pub fn populations(&self, step: usize) -> Vec<f64> {
        self.amplitudes[step].iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm_drift.iter().copied().fold(0.0, f64::max)
    }

    /// Largest relative deviation of the energy from its initial value.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy.first().copied().unwrap_or(0.0);
        let scale = e0.abs().max(1.0);
        self.energy.iter().map(|e| (e - e0).abs() / scale).fold(0.0, f64::max)
    }

    /// CSV with `t`, one population column per tracked state, leakage out
    /// of the tracked set and the norm.
    pub fn to_csv(&self, tracked: &[(usize, String)]) -> String {
        let mut out = String::from("t");
        for (_, label) in tracked {
            let _ = write!(out, ",{label}");
        }
        out.push_str(",leakage,norm\n");
        for step in 0..self.times.len() {
            let _ = write!(out, "{:.16e}", self.times[step]);
            let mut inside = 0.0;
            for (i, _) in tracked {
                let p = self.population(step, *i);
                inside += p;
                let _ = write!(out, ",{p:.16e}");
            }
            let norm = self.amplitudes[step].norm();
            let _ = writeln!(out, ",{:.16e},{:.16e}", norm * norm - inside, norm);
        }
        out
    }
}

/// Eigendecomposition of a small Hermitian matrix, reused for many times.
#[derive(Debug, Clone)]
pub struct Spectral {
    values: Vec<f64>,
    vectors: CMatrix,
}

impl Spectral {
    pub fn new(h: &SparseMatrix) -> Result<Self> {
        check_hermitian(h)?;
        let (values, vectors) = hermitian_eigen(&h.to_dense());
        Ok(Self { values, vectors })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Coefficients of `psi` in the eigenbasis.
    pub fn coefficients(&self, psi: &CVector) -> CVector {
        self.vectors.adjoint() * psi
    }

    pub fn evolve(&self, coeffs: &CVector, t: f64) -> CVector {
        let phased = CVector::from_fn(coeffs.len(), |i, _| {
            coeffs[i] * Complex64::from_polar(1.0, -self.values[i] * t)
        });
        &self.vectors * phased
    }

    /// Amplitude of basis state `state` at time `t` and its time derivative.
    fn amplitude_and_rate(&self, coeffs: &CVector, state: usize, t: f64) -> (Complex64, Complex64) {
        let mut a = Complex64::new(0.0, 0.0);
        let mut da = Complex64::new(0.0, 0.0);
        for i in 0..self.values.len() {
            let term = self.vectors[(state, i)] * coeffs[i] * Complex64::from_polar(1.0, -self.values[i] * t);
            a += term;
            da += term * Complex64::new(0.0, -self.values[i]);
        }
        (a, da)
    }
}

fn check_hermitian(h: &SparseMatrix) -> Result<()> {
    let residual = h.hermiticity_residual();
    if residual > HERMITICITY_TOL * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

fn normalized(initial: &CVector) -> Result<CVector> {
    let nrm = initial.norm();
    if nrm == 0.0 || !nrm.is_finite() {
        return Err(Error::ZeroNorm);
    }
    Ok(initial.unscale(nrm))
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("times must be finite and strictly increasing".into()));
    }
    Ok(())
}

fn expectation(h: &SparseMatrix, psi: &CVector) -> f64 {
    let mut hp = CVector::zeros(psi.len());
    h.matvec_into(psi, &mut hp);
    psi.dotc(&hp).re
}

/// One Krylov step `exp(-i h dt) psi`.
fn krylov_step(h: &SparseMatrix, psi: &CVector, dt: f64) -> CVector {
    let dim = psi.len();
    let beta0 = psi.norm();
    let mut basis = vec![psi.unscale(beta0)];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut w = CVector::zeros(dim);
    let one = Complex64::new(1.0, 0.0);
    for j in 0..KRYLOV_DIM.min(dim) {
        h.matvec_into(&basis[j], &mut w);
        alpha.push(basis[j].dotc(&w).re);
        for _ in 0..2 {
            for q in &basis {
                let c = q.dotc(&w);
                w.axpy(-c, q, one);
            }
        }
        let b = w.norm();
        if j + 1 == KRYLOV_DIM.min(dim) || b < 1e-14 {
            break;
        }
        beta.push(b);
        basis.push(w.unscale(b));
    }
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    // exp(-i T dt) e1
    let mut small = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..m {
        let phase = Complex64::from_polar(eig.eigenvectors[(0, k)], -eig.eigenvalues[k] * dt);
        for (i, s) in small.iter_mut().enumerate() {
            *s += phase * eig.eigenvectors[(i, k)];
        }
    }
    let mut out = CVector::zeros(dim);
    for (q, s) in basis.iter().zip(&small) {
        out.axpy(*s * beta0, q, one);
    }
    out
}

/// `|psi(t)> = exp(-i h t)|psi(0)>` at each requested time. Dense spectral
/// propagation up to `DENSE_PROPAGATION_LIMIT`, Krylov steps above it.
pub fn propagate(h: &SparseMatrix, initial: &CVector, times: &[f64]) -> Result<Trajectory> {
    if initial.len() != h.dim() {
        return Err(Error::Precondition(format!(
            "state of length {} for a {}-dimensional Hamiltonian",
            initial.len(),
            h.dim()
        )));
    }
    check_times(times)?;
    let psi0 = normalized(initial)?;
    let amplitudes: Vec<CVector> = if h.dim() <= DENSE_PROPAGATION_LIMIT {
        let spectral = Spectral::new(h)?;
        let coeffs = spectral.coefficients(&psi0);
        times.iter().map(|&t| spectral.evolve(&coeffs, t)).collect()
    } else {
        check_hermitian(h)?;
        // Gershgorin bound on the spectral radius sets the substep
        let radius = (0..h.dim())
            .map(|i| h.row(i).iter().map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
            .max(1e-300);
        let max_step = 4.0 / radius;
        let mut out = Vec::with_capacity(times.len());
        let mut psi = psi0.clone();
        let mut now = 0.0;
        for &t in times {
            let mut left = t - now;
            while left.abs() > 0.0 {
                let dt = left.signum() * left.abs().min(max_step);
                psi = krylov_step(h, &psi, dt);
                left -= dt;
            }
            now = t;
            out.push(psi.clone());
        }
        out
    };
    let norm_drift = amplitudes.iter().map(|a| (a.norm() - 1.0).abs()).collect();
    let energy = amplitudes.iter().map(|a| expectation(h, a)).collect();
    Ok(Trajectory {
        times: times.to_vec(),
        amplitudes,
        norm_drift,
        energy,
    })
}

/// Piecewise-constant evolution: each segment `(h, duration)` runs in turn,
/// sampled at `samples` evenly spaced points per segment.
pub fn propagate_segments(segments: &[(SparseMatrix, f64)], initial: &CVector, samples: usize) -> Result<Trajectory> {
    let mut psi = normalized(initial)?;
    let mut start = 0.0;
    let mut all = Trajectory {
        times: Vec::new(),
        amplitudes: Vec::new(),
        norm_drift: Vec::new(),
        energy: Vec::new(),
    };
    for (h, duration) in segments {
        if *duration <= 0.0 {
            return Err(Error::Precondition("segment durations must be positive".into()));
        }
        let n = samples.max(1);
        let local: Vec<f64> = (1..=n).map(|i| duration * i as f64 / n as f64).collect();
        let part = propagate(h, &psi, &local)?;
        psi = part.amplitudes.last().expect("non-empty").clone();
        all.times.extend(local.iter().map(|t| start + t));
        all.amplitudes.extend(part.amplitudes);
        all.norm_drift.extend(part.norm_drift);
        all.energy.extend(part.energy);
        start += duration;
    }
    Ok(all)
}

pub fn basis_state(space: &FockSpace, occupation: &[u32]) -> Result<CVector> {
    let i = space
        .index_of(occupation)
        .ok_or_else(|| Error::StateNotInBasis(occupation.to_vec()))?;
    let mut v = CVector::zeros(space.dim());
    v[i] = Complex64::new(1.0, 0.0);
    Ok(v)
}

/// The pair `|n1, n2>`, `|n1+1, n2-1>` coupled by one hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoLevelModel {
    pub n1: u32,
    pub n2: u32,
    /// Effective hopping amplitude for this pair.
    pub k: Complex64,
    /// `<n1+1, n2-1| H |n1, n2> = k sqrt((n1+1) n2)`.
    pub coupling: Complex64,
    pub g: f64,
    /// Secular energy of the target minus that of the initial state.
    pub delta: f64,
    pub e_initial: f64,
}

pub fn two_level(params: &QubitParams, n1: u32, n2: u32) -> Result<TwoLevelModel> {
    if n2 == 0 {
        return Err(Error::Precondition("n2 = 0 leaves no state to hop to".into()));
    }
    let k = params.transfer_amplitude(n1, n2);
    let coupling = k * (((n1 + 1) * n2) as f64).sqrt();
    let e_initial = params.secular_energy(n1, n2);
    Ok(TwoLevelModel {
        n1,
        n2,
        k,
        coupling,
        g: coupling.norm(),
        delta: params.secular_energy(n1 + 1, n2 - 1) - e_initial,
        e_initial,
    })
}

impl TwoLevelModel {
    /// Generalized Rabi frequency `sqrt(g^2 + delta^2/4)`.
    pub fn rabi_frequency(&self) -> f64 {
        (self.g * self.g + 0.25 * self.delta * self.delta).sqrt()
    }

    /// Largest reachable target population `g^2 / (g^2 + delta^2/4)`.
    pub fn max_transfer(&self) -> f64 {
        let w = self.rabi_frequency();
        if w == 0.0 {
            0.0
        } else {
            self.g * self.g / (w * w)
        }
    }

    /// Analytic amplitudes `(alpha, beta)` starting from `|n1, n2>`, without
    /// the global phase `exp(-i E_initial t)`.
    pub fn amplitudes(&self, t: f64) -> (Complex64, Complex64) {
        let w = self.rabi_frequency();
        let drift = Complex64::from_polar(1.0, -0.5 * self.delta * t);
        if w == 0.0 {
            return (drift, Complex64::new(0.0, 0.0));
        }
        let (s, c) = (w * t).sin_cos();
        let alpha = Complex64::new(c, 0.5 * self.delta / w * s) * drift;
        let beta = Complex64::new(0.0, -1.0) * self.coupling * (s / w) * drift;
        (alpha, beta)
    }

    pub fn pair(&self) -> [[u32; 2]; 2] {
        [[self.n1, self.n2], [self.n1 + 1, self.n2 - 1]]
    }
}

/// Two-state Fock space holding exactly the qubit pair of `|n1, n2>`.
pub fn isolated_pair_space(params: &QubitParams, n1: u32, n2: u32) -> Result<FockSpace> {
    if n2 == 0 {
        return Err(Error::Precondition("n2 = 0 leaves no state to hop to".into()));
    }
    let modes = params.modes();
    if modes.len() != 2 {
        return Err(Error::Precondition("isolated pairs are defined for the two-mode model".into()));
    }
    make_fock_space(modes, vec![n1 + 1, n2], Some(n1 + n2))
}

/// Full shell of the two-mode model with total occupation `n_t`.
pub fn shell_space(params: &QubitParams, n_t: u32) -> Result<FockSpace> {
    let modes = params.modes();
    let caps = vec![n_t; modes.len()];
    make_fock_space(modes, caps, Some(n_t))
}

/// Rabi frequency read off the first maximum of the target population:
/// `pi / (2 t_max)`. Returns 0 when the population never rises.
pub fn measure_rabi_frequency(
    h: &SparseMatrix,
    initial: usize,
    target: usize,
    window: f64,
    grid: usize,
) -> Result<f64> {
    if h.dim() > DENSE_PROPAGATION_LIMIT {
        return Err(Error::Precondition(format!(
            "Rabi measurement needs a dense-propagation space, dimension {}",
            h.dim()
        )));
    }
    let spectral = Spectral::new(h)?;
    let mut psi0 = CVector::zeros(h.dim());
    psi0[initial] = Complex64::new(1.0, 0.0);
    let coeffs = spectral.coefficients(&psi0);
    let rate = |t: f64| {
        let (a, da) = spectral.amplitude_and_rate(&coeffs, target, t);
        2.0 * (a.conj() * da).re
    };
    let pop = |t: f64| spectral.amplitude_and_rate(&coeffs, target, t).0.norm_sqr();
    let grid = grid.max(3);
    let ts: Vec<f64> = (0..grid).map(|i| window * i as f64 / (grid - 1) as f64).collect();
    let ps: Vec<f64> = ts.iter().map(|&t| pop(t)).collect();
    if ps.iter().all(|p| *p <= 1e-24) {
        return Ok(0.0);
    }
    let peak = (1..grid - 1).find(|&i| ps[i] >= ps[i - 1] && ps[i] > ps[i + 1]);
    let Some(i) = peak else {
        return Err(Error::Precondition(format!(
            "no population maximum inside the window [0, {window}]"
        )));
    };
    // the derivative changes sign from + to - between the neighbours
    let (mut a, mut b) = (ts[i - 1], ts[i + 1]);
    if rate(a) <= 0.0 {
        a = ts[i];
    }
    if rate(b) >= 0.0 {
        b = ts[i];
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a) <= 1e-15 * m.abs().max(1e-300) {
            break;
        }
        if rate(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let t_max = 0.5 * (a + b);
    Ok(std::f64::consts::PI / (2.0 * t_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n1: u32,
    pub n2: u32,
    pub n_t: u32,
    pub g: f64,
    pub delta: f64,
    pub predicted_frequency: f64,
    pub measured_frequency: f64,
    pub max_transfer: f64,
}

/// Rabi frequencies of isolated pairs, measured by propagation and
/// compared with `sqrt(g^2 + delta^2/4)`. Rows sorted by `n_t`.
pub fn scaling_study(params: &QubitParams, occupations: &[(u32, u32)]) -> Result<Vec<ScalingRow>> {
    let h = params.hamiltonian();
    let mut rows = Vec::with_capacity(occupations.len());
    for &(n1, n2) in occupations {
        let model = two_level(params, n1, n2)?;
        let space = isolated_pair_space(params, n1, n2)?;
        let m = build_fock_matrix(&h, &space)?;
        let from = space.index_of(&[n1, n2]).expect("pair state");
        let to = space.index_of(&[n1 + 1, n2 - 1]).expect("pair state");
        let predicted = model.rabi_frequency();
        let measured = if model.g == 0.0 {
            0.0
        } else {
            measure_rabi_frequency(&m, from, to, std::f64::consts::PI / predicted, 2001)?
        };
        rows.push(ScalingRow {
            n1,
            n2,
            n_t: n1 + n2,
            g: model.g,
            delta: model.delta,
            predicted_frequency: predicted,
            measured_frequency: measured,
            max_transfer: model.max_transfer(),
        });
    }
    rows.sort_by_key(|r| r.n_t);
    Ok(rows)
}

/// `1 - sum of populations in the subspace`, as (maximum, final).
pub fn leakage(traj: &Trajectory, subspace: &[usize]) -> (f64, f64) {
    let per_step: Vec<f64> = (0..traj.times.len())
        .map(|s| 1.0 - subspace.iter().map(|&i| traj.population(s, i)).sum::<f64>())
        .collect();
    let max = per_step.iter().copied().fold(0.0, f64::max);
    (max, per_step.last().copied().unwrap_or(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeakageReport {
    pub n1: u32,
    pub n2: u32,
    pub g: f64,
    pub window: f64,
    pub max_leakage: f64,
    pub final_leakage: f64,
    pub max_norm_drift: f64,
    pub energy_drift: f64,
}

/// Propagates `|n1, n2>` on its full shell for one Rabi period `pi / g` and
/// measures the population leaving the qubit pair.
pub fn shell_leakage(params: &QubitParams, n1: u32, n2: u32, steps: usize) -> Result<LeakageReport> {
    let model = two_level(params, n1, n2)?;
    if model.g == 0.0 {
        return Err(Error::Precondition("zero coupling: no Rabi period".into()));
    }
    let space = shell_space(params, n1 + n2)?;
    let h = build_fock_matrix(&params.hamiltonian(), &space)?;
    let a = space.index_of(&[n1, n2]).expect("shell state");
    let b = space.index_of(&[n1 + 1, n2 - 1]).expect("shell state");
    let window = std::f64::consts::PI / model.g;
    let steps = steps.max(2);
    let times: Vec<f64> = (1..=steps).map(|i| window * i as f64 / steps as f64).collect();
    let mut psi0 = CVector::zeros(space.dim());
    psi0[a] = Complex64::new(1.0, 0.0);
    let traj = propagate(&h, &psi0, &times)?;
    let (max_leakage, final_leakage) = leakage(&traj, &[a, b]);
    Ok(LeakageReport {
        n1,
        n2,
        g: model.g,
        window,
        max_leakage,
        final_leakage,
        max_norm_drift: traj.max_norm_drift(),
        energy_drift: traj.energy_drift(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn two_by_two(g: f64, delta: f64) -> SparseMatrix {
        SparseMatrix::from_triplets(2, [(0, 1, c(g)), (1, 0, c(g)), (1, 1, c(delta))])
    }

    fn start() -> CVector {
        CVector::from_vec(vec![c(1.0), c(0.0)])
    }

    #[test]
    fn zero_hamiltonian_is_static() {
        let h = SparseMatrix::from_triplets(2, []);
        let traj = propagate(&h, &start(), &[0.5, 1.0, 7.0]).unwrap();
        for a in &traj.amplitudes {
            assert_eq!(a[0], c(1.0));
        }
    }

    #[test]
    fn resonant_rabi() {
        let g = 0.3;
        let times: Vec<f64> = (1..50).map(|i| 0.2 * i as f64).collect();
        let traj = propagate(&two_by_two(g, 0.0), &start(), &times).unwrap();
        for (s, t) in times.iter().enumerate() {
            assert!((traj.population(s, 1) - (g * t).sin().powi(2)).abs() < 1e-12);
        }
        assert!(traj.max_norm_drift() < 1e-12);
    }

    #[test]
    fn detuned_max_transfer() {
        let (g, d) = (0.3, 0.5);
        let h = two_by_two(g, d);
        let w = (g * g + d * d / 4.0).sqrt();
        let traj = propagate(&h, &start(), &[std::f64::consts::PI / (2.0 * w)]).unwrap();
        assert!((traj.population(0, 1) - g * g / (w * w)).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let bad = SparseMatrix::from_triplets(2, [(0, 1, c(1.0))]);
        assert!(matches!(propagate(&bad, &start(), &[1.0]), Err(Error::NotHermitian { .. })));
        let zero = CVector::zeros(2);
        assert!(matches!(
            propagate(&two_by_two(1.0, 0.0), &zero, &[1.0]),
            Err(Error::ZeroNorm)
        ));
        assert!(propagate(&two_by_two(1.0, 0.0), &start(), &[1.0, 0.5]).is_err());
    }

    #[test]
    fn krylov_agrees_with_spectral() {
        // tridiagonal chain, dense path vs forced Krylov steps
        let n = 40;
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, c(0.1 * i as f64)));
            if i + 1 < n {
                trip.push((i, i + 1, c(0.7)));
                trip.push((i + 1, i, c(0.7)));
            }
        }
        let h = SparseMatrix::from_triplets(n, trip);
        let mut psi = CVector::zeros(n);
        psi[3] = c(1.0);
        let exact = propagate(&h, &psi, &[2.5]).unwrap();
        let mut k = psi.clone();
        for _ in 0..10 {
            k = krylov_step(&h, &k, 0.25);
        }
        assert!((&k - &exact.amplitudes[0]).norm() < 1e-10);
    }

    #[test]
    fn two_level_examples() {
        let p = QubitParams::effective([0.0; 2], [0.0; 2], 0.0, c(1.0), 0.0);
        assert_eq!(two_level(&p, 0, 1).unwrap().g, 1.0);
        assert!((two_level(&p, 0, 100).unwrap().g - 10.0).abs() < 1e-14);
        assert!(two_level(&p, 3, 0).is_err());
    }

    #[test]
    fn detuning_matches_fock_diagonal() {
        let p = QubitParams::effective([0.2, 0.2], [0.05, 0.05], 0.1, c(0.01), 0.002);
        let m = two_level(&p, 2, 3).unwrap();
        let space = isolated_pair_space(&p, 2, 3).unwrap();
        let h = build_fock_matrix(&p.hamiltonian(), &space).unwrap();
        let a = space.index_of(&[2, 3]).unwrap();
        let b = space.index_of(&[3, 2]).unwrap();
        assert!((h.get(b, b).re - h.get(a, a).re - m.delta).abs() < 1e-14);
        assert!((h.get(b, a) - m.coupling).norm() < 1e-14);
        // with n = -1 -> +1 the symmetric pair is degenerate
        assert!(m.delta.abs() < 1e-14);
    }

    #[test]
    fn scaling_ladder_and_zero_coupling() {
        let p = QubitParams::effective([0.0; 2], [0.0; 2], 0.0, c(0.5), 0.0);
        let rows = scaling_study(&p, &[(0, 9), (0, 1), (0, 4)]).unwrap();
        assert_eq!(rows.iter().map(|r| r.n_t).collect::<Vec<_>>(), vec![1, 4, 9]);
        for (r, want) in rows.iter().zip([1.0, 2.0, 3.0]) {
            assert!((r.measured_frequency / rows[0].measured_frequency - want).abs() < 1e-9);
        }
        let p0 = QubitParams::effective([0.0; 2], [0.0; 2], 0.0, c(0.0), 0.0);
        let rows = scaling_study(&p0, &[(0, 1), (0, 4)]).unwrap();
        assert!(rows.iter().all(|r| r.measured_frequency == 0.0));
    }

    #[test]
    fn strong_detuning_suppresses_transfer() {
        let m = TwoLevelModel {
            n1: 0,
            n2: 1,
            k: c(1.0),
            coupling: c(1.0),
            g: 1.0,
            delta: 20.0,
            e_initial: 0.0,
        };
        assert!((m.max_transfer() - 1.0 / 101.0).abs() < 1e-15);
    }

    #[test]
    fn leakage_on_two_state_space() {
        let traj = propagate(&two_by_two(0.4, 0.1), &start(), &[0.3, 1.0, 2.0]).unwrap();
        let (max, fin) = leakage(&traj, &[0, 1]);
        assert!(max.abs() < 1e-12 && fin.abs() < 1e-12);
    }
}
