//! Reduction of the plane-wave Hamiltonian to the two-condensate qubit model.

use num_complex::Complex64;
use serde::Serialize;

use crate::bosonize::{BosonTermSum, Mode, Op};
use crate::couplings::FourierTable;
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, WaveVector};

/// Absolute tolerance on synchronism residuals.
pub const SYNCHRONISM_TOL: f64 = 1e-10;
/// Relative tolerance for `lambda1 == lambda2`.
pub const LAMBDA_SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum QubitModel {
    /// Both condensates at zero wavevector.
    Basic,
    /// Condensates at `+-k` in each sample.
    DoubleWell { k: [WaveVector; 2] },
}

/// Parameters of the two-condensate Hamiltonian
/// `E1 n1 + E2 n2 + l1 n1^2 + l2 n2^2 - l12 n1 n2 + hopping`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QubitParams {
    pub e1: f64,
    pub e2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda12: f64,
    /// Linear hopping, coefficient of `b+_1 b_2`.
    pub kappa: Complex64,
    /// Quartic hopping for equal spins, `(J + (Dxx + Dyy)/2)_cross / 4N`.
    pub kappa_prime: f64,
    /// Quartic hopping split by family: `b+_1 b+_2 b_2 b_2` and `b+_2 b+_1 b_1 b_1`
    /// (each with its Hermitian partner). Equal to `kappa_prime` when `S1 == S2`.
    pub kappa_prime_pair: [f64; 2],
    /// Longitudinal field of the other sample folded into `E1`, `E2`.
    pub mean_field: [f64; 2],
    /// Cross transverse coupling the hopping terms were built from.
    pub cross_transverse: Complex64,
    pub n: usize,
    pub spins: [f64; 2],
    pub model: QubitModel,
    pub source: String,
}

impl QubitParams {
    /// Parameters given directly, for studies of the effective model itself.
    /// Spins are taken equal, so both quartic hopping families coincide.
    #[allow(clippy::too_many_arguments)]
    pub fn effective(
        e: [f64; 2],
        lambda: [f64; 2],
        lambda12: f64,
        kappa: Complex64,
        kappa_prime: f64,
    ) -> Self {
        Self {
            e1: e[0],
            e2: e[1],
            lambda1: lambda[0],
            lambda2: lambda[1],
            lambda12,
            kappa,
            kappa_prime,
            kappa_prime_pair: [kappa_prime; 2],
            mean_field: [0.0; 2],
            cross_transverse: Complex64::new(0.0, 0.0),
            n: 1,
            spins: [0.5; 2],
            model: QubitModel::Basic,
            source: "given".into(),
        }
    }

    /// Secular (diagonal) energy of `|n1, n2>`; for the double-well model the
    /// occupations are the totals of the `+-k` modes.
    pub fn secular_energy(&self, n1: u32, n2: u32) -> f64 {
        let (a, b) = (n1 as f64, n2 as f64);
        self.e1 * a + self.e2 * b + self.lambda1 * a * a + self.lambda2 * b * b - self.lambda12 * a * b
    }

    /// Matrix element `<n1+1, n2-1| H |n1, n2>` divided by `sqrt((n1+1) n2)`.
    pub fn transfer_amplitude(&self, n1: u32, n2: u32) -> Complex64 {
        let [ka, kb] = self.kappa_prime_pair;
        self.kappa + ka * (n2 as f64 - 1.0) + kb * n1 as f64
    }

    pub fn modes(&self) -> Vec<Mode> {
        match self.model {
            QubitModel::Basic => vec![Mode::Condensate(0), Mode::Condensate(1)],
            QubitModel::DoubleWell { k } => vec![
                Mode::Wave { sample: 0, k: k[0] },
                Mode::Wave { sample: 0, k: k[0].neg() },
                Mode::Wave { sample: 1, k: k[1] },
                Mode::Wave { sample: 1, k: k[1].neg() },
            ],
        }
    }

    /// Condensate Hamiltonian as a boson term sum over `self.modes()`.
    pub fn hamiltonian(&self) -> BosonTermSum {
        match self.model {
            QubitModel::Basic => self.basic_hamiltonian(),
            QubitModel::DoubleWell { .. } => self.doublewell_hamiltonian(),
        }
    }

    fn basic_hamiltonian(&self) -> BosonTermSum {
        let (a, b) = (Mode::Condensate(0), Mode::Condensate(1));
        let mut h = BosonTermSum::new();
        push_number(&mut h, self.e1, &[a]);
        push_number(&mut h, self.e2, &[b]);
        push_square(&mut h, self.lambda1, &[a]);
        push_square(&mut h, self.lambda2, &[b]);
        push_product(&mut h, -self.lambda12, &[a], &[b]);
        h.push_with_adjoint(self.kappa, vec![Op::create(a), Op::annihilate(b)]);
        let [ka, kb] = self.kappa_prime_pair;
        let re = |x: f64| Complex64::new(x, 0.0);
        h.push_with_adjoint(
            re(ka),
            vec![Op::create(a), Op::create(b), Op::annihilate(b), Op::annihilate(b)],
        );
        h.push_with_adjoint(
            re(kb),
            vec![Op::create(b), Op::create(a), Op::annihilate(a), Op::annihilate(a)],
        );
        h.pruned(0.0)
    }

    /// The `+-k` four-mode Hamiltonian with exactly the quartic hopping
    /// terms of the standard double-well reduction.
    fn doublewell_hamiltonian(&self) -> BosonTermSum {
        let m = self.modes();
        let (p1, m1, p2, m2) = (m[0], m[1], m[2], m[3]);
        let mut h = BosonTermSum::new();
        push_number(&mut h, self.e1, &[p1, m1]);
        push_number(&mut h, self.e2, &[p2, m2]);
        push_square(&mut h, self.lambda1, &[p1, m1]);
        push_square(&mut h, self.lambda2, &[p2, m2]);
        push_product(&mut h, -self.lambda12, &[p1, m1], &[p2, m2]);
        h.push_with_adjoint(self.kappa, vec![Op::create(p1), Op::annihilate(p2)]);
        h.push_with_adjoint(self.kappa, vec![Op::create(m1), Op::annihilate(m2)]);
        let kp = Complex64::new(self.kappa_prime, 0.0);
        let quartic = [
            [p1, p2, p2, p2],
            [p2, p1, p1, p1],
            [p1, m2, m2, p2],
            [p2, m1, m1, p1],
            [m1, m2, m2, m2],
            [m2, m1, m1, m1],
            [m1, p2, p2, m2],
            [m2, p1, p1, m1],
        ];
        for [a, b, c, d] in quartic {
            h.push_with_adjoint(
                kp,
                vec![Op::create(a), Op::create(b), Op::annihilate(c), Op::annihilate(d)],
            );
        }
        h.pruned(0.0)
    }
}

fn push_number(h: &mut BosonTermSum, e: f64, modes: &[Mode]) {
    for &m in modes {
        h.push_real(e, vec![Op::create(m), Op::annihilate(m)]);
    }
}

/// `l (sum n)^2` over the given modes.
fn push_square(h: &mut BosonTermSum, l: f64, modes: &[Mode]) {
    push_product(h, l, modes, modes);
}

/// `c (sum_a n_a)(sum_b n_b)`.
fn push_product(h: &mut BosonTermSum, c: f64, left: &[Mode], right: &[Mode]) {
    for &a in left {
        for &b in right {
            h.push_real(
                c,
                vec![Op::create(a), Op::annihilate(a), Op::create(b), Op::annihilate(b)],
            );
        }
    }
}

/// Plane-wave couplings entering the synchronism conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CondensateCouplings {
    pub j0: [f64; 2],
    pub dzz0: [f64; 2],
    /// `(Dxx + Dyy) / 2` at zero wavevector.
    pub dperp0: [f64; 2],
    pub jk: [f64; 2],
    /// `(Dxx + Dyy) / 2` at the condensate wavevector.
    pub dperpk: [f64; 2],
    /// Cross exchange at zero wavevectors.
    pub j12: f64,
    pub dzz12: f64,
}

impl CondensateCouplings {
    pub fn from_fourier(fourier: &FourierTable, k: [WaveVector; 2]) -> Result<Self> {
        let mut out = Self {
            j0: [0.0; 2],
            dzz0: [0.0; 2],
            dperp0: [0.0; 2],
            jk: [0.0; 2],
            dperpk: [0.0; 2],
            j12: 0.0,
            dzz12: 0.0,
        };
        for m in 0..2 {
            let zero = WaveVector::zero(k[m].dims);
            let f0 = fourier.intra(m, &zero)?;
            let fk = fourier.intra(m, &k[m])?;
            out.j0[m] = f0.exchange.re;
            out.dzz0[m] = f0.dipole[(2, 2)].re;
            out.dperp0[m] = 0.5 * (f0.dipole[(0, 0)] + f0.dipole[(1, 1)]).re;
            out.jk[m] = fk.exchange.re;
            out.dperpk[m] = 0.5 * (fk.dipole[(0, 0)] + fk.dipole[(1, 1)]).re;
        }
        let c = fourier.cross(&WaveVector::zero(k[0].dims), &WaveVector::zero(k[1].dims))?;
        out.j12 = c.exchange.re;
        out.dzz12 = c.dipole[(2, 2)].re;
        Ok(out)
    }

    /// `J_k + (Dxx+Dyy)_k/2 - J_0 - Dzz_0` of sample `m`.
    pub fn well_depth(&self, m: usize) -> f64 {
        self.jk[m] + self.dperpk[m] - self.j0[m] - self.dzz0[m]
    }

    pub fn cross_longitudinal(&self) -> f64 {
        self.j12 + self.dzz12
    }
}

/// Zero-wavevector condensates in both samples.
///
/// `E_m` includes the longitudinal mean field of the other sample, so the
/// result coincides with the plane-wave Hamiltonian restricted to the two
/// zero modes.
pub fn basic_params(fourier: &FourierTable, lattice: &LatticeSpec) -> Result<QubitParams> {
    let zero = [
        WaveVector::zero(lattice.dims(0)?),
        WaveVector::zero(lattice.dims(1)?),
    ];
    let mut p = condensate_params(fourier, lattice, zero, false)?;
    p.model = QubitModel::Basic;
    p.source = "zero-wavevector condensates; hopping from the cross transverse coupling".into();
    Ok(p)
}

/// Condensates at `+-k_m` in each sample.
pub fn doublewell_params(fourier: &FourierTable, lattice: &LatticeSpec, k0: [WaveVector; 2]) -> Result<QubitParams> {
    let mut p = condensate_params(fourier, lattice, k0, true)?;
    p.model = QubitModel::DoubleWell { k: k0 };
    p.source = "double-well condensates at +-k; hopping nonzero only for equal wavevectors".into();
    Ok(p)
}

fn condensate_params(
    fourier: &FourierTable,
    lattice: &LatticeSpec,
    k: [WaveVector; 2],
    with_exchange: bool,
) -> Result<QubitParams> {
    let n = fourier.n();
    let nf = n as f64;
    let spins = [lattice.spin(0), lattice.spin(1)];
    let fields = [lattice.field(0), lattice.field(1)];
    let zero = [WaveVector::zero(k[0].dims), WaveVector::zero(k[1].dims)];
    let cross0 = fourier.cross(&zero[0], &zero[1])?;
    let zc = cross0.longitudinal().re;
    let mut e = [0.0; 2];
    let mut lambda = [0.0; 2];
    let mut mean_field = [0.0; 2];
    for m in 0..2 {
        let f0 = fourier.intra(m, &zero[m])?;
        let energy_at = |q: &WaveVector| -> Result<(f64, f64)> {
            let fk = fourier.intra(m, q)?;
            let (z0, tk) = if with_exchange {
                (f0.longitudinal().re, fk.transverse().re)
            } else {
                (
                    f0.dipole[(2, 2)].re,
                    0.5 * (fk.dipole[(0, 0)] + fk.dipole[(1, 1)]).re,
                )
            };
            Ok((z0 - tk, tk - z0))
        };
        let (gap, depth) = energy_at(&k[m])?;
        if with_exchange {
            let (gap_minus, _) = energy_at(&k[m].neg())?;
            let scale = 1.0 + gap.abs();
            if (gap - gap_minus).abs() > 1e-9 * scale {
                return Err(Error::Asymmetry {
                    sample: m + 1,
                    difference: gap - gap_minus,
                });
            }
        }
        mean_field[m] = spins[1 - m] * zc;
        e[m] = (spins[m] + 1.0 / (2.0 * nf)) * gap + fields[m] + mean_field[m];
        lambda[m] = depth / (2.0 * nf);
    }
    if lambda[0] * lambda[1] < 0.0 {
        return Err(Error::SynchronismImpossible {
            product: lambda[0] * lambda[1],
        });
    }

    let t_hop = fourier.cross(&k[0], &k[1].neg())?.transverse();
    if with_exchange {
        let t_partner = fourier.cross(&k[0].neg(), &k[1])?.transverse();
        let scale = 1.0 + t_hop.norm();
        if (t_hop - t_partner).norm() > 1e-9 * scale {
            return Err(Error::Asymmetry {
                sample: 0,
                difference: (t_hop - t_partner).norm(),
            });
        }
    }
    let root = (spins[0] * spins[1]).sqrt();
    let kappa = -t_hop * root;
    let kappa_prime = t_hop.re / (4.0 * nf);
    let kappa_prime_pair = [
        root / (4.0 * spins[1] * nf) * t_hop.re,
        root / (4.0 * spins[0] * nf) * t_hop.re,
    ];
    Ok(QubitParams {
        e1: e[0],
        e2: e[1],
        lambda1: lambda[0],
        lambda2: lambda[1],
        lambda12: zc / nf,
        kappa,
        kappa_prime,
        kappa_prime_pair,
        mean_field,
        cross_transverse: t_hop,
        n,
        spins,
        model: QubitModel::Basic,
        source: String::new(),
    })
}

/// Which synchronism condition to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynchronismForm {
    /// `lambda12 = 2 sqrt(lambda1 lambda2)`.
    Generic,
    /// Identical samples with positive transverse dipolar excess.
    SameSamples,
    /// Identical samples with negative transverse dipolar excess: no transfer.
    NoTransverse,
    DoubleWell,
    SmallSample,
    Films,
    FilmsK0,
}

impl SynchronismForm {
    pub const ALL: [SynchronismForm; 7] = [
        Self::Generic,
        Self::SameSamples,
        Self::NoTransverse,
        Self::DoubleWell,
        Self::SmallSample,
        Self::Films,
        Self::FilmsK0,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Generic => "generic",
            Self::SameSamples => "same-samples",
            Self::NoTransverse => "no-transverse",
            Self::DoubleWell => "double-well",
            Self::SmallSample => "small-sample",
            Self::Films => "films",
            Self::FilmsK0 => "films-k0",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum SynchronismInput<'a> {
    Params(&'a QubitParams),
    Raw(&'a CondensateCouplings),
}

fn checked_sqrt(form: SynchronismForm, radicand: f64) -> Result<f64> {
    if radicand < 0.0 {
        return Err(Error::NegativeRadicand {
            form: form.name().into(),
            radicand,
        });
    }
    Ok(radicand.sqrt())
}

/// Left minus right side of the selected synchronism condition; zero when it holds.
pub fn synchronism_residual(input: SynchronismInput<'_>, form: SynchronismForm) -> Result<f64> {
    match (input, form) {
        (SynchronismInput::Params(p), SynchronismForm::Generic | SynchronismForm::DoubleWell) => {
            Ok(p.lambda12 - 2.0 * checked_sqrt(form, p.lambda1 * p.lambda2)?)
        }
        (SynchronismInput::Params(_), _) => Err(Error::Precondition(format!(
            "synchronism form '{}' needs raw couplings",
            form.name()
        ))),
        (SynchronismInput::Raw(c), _) => {
            let excess = |m: usize| c.dperp0[m] - c.dzz0[m];
            match form {
                SynchronismForm::Generic => {
                    Ok(c.cross_longitudinal() - checked_sqrt(form, excess(0) * excess(1))?)
                }
                SynchronismForm::SameSamples => {
                    if excess(0) <= 0.0 {
                        return Err(Error::Precondition(format!(
                            "transverse dipolar excess {} is not positive; use the no-transverse form",
                            excess(0)
                        )));
                    }
                    Ok(c.j0[0] + c.dperp0[0] - (c.j0[0] + c.dzz0[0] + c.cross_longitudinal()))
                }
                SynchronismForm::NoTransverse => {
                    if excess(0) >= 0.0 {
                        return Err(Error::Precondition(format!(
                            "transverse dipolar excess {} is not negative; use the same-samples form",
                            excess(0)
                        )));
                    }
                    Ok(c.j0[0] + c.dperp0[0])
                }
                SynchronismForm::DoubleWell => {
                    Ok(c.cross_longitudinal() - checked_sqrt(form, c.well_depth(0) * c.well_depth(1))?)
                }
                SynchronismForm::SmallSample | SynchronismForm::FilmsK0 => {
                    Ok(c.jk[0] + c.dperpk[0] - (c.j0[0] + c.dzz0[0] + c.cross_longitudinal()))
                }
                SynchronismForm::Films => {
                    Ok(checked_sqrt(form, c.well_depth(0) * c.well_depth(1))? - c.cross_longitudinal())
                }
            }
        }
    }
}

/// Parameter sets for which the synchronism condition can be solved for one unknown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SynchronismModel {
    /// Monolayer films with nearest-neighbour in-plane exchange `exchange`;
    /// the condensate wavevector runs along x. `dimension` is 1 (chain) or 2
    /// (square lattice), giving `J_k = 2J cos k` or `2J cos k + 2J`.
    Film {
        exchange: f64,
        dimension: u8,
        /// `(Dxx + Dyy) / 2` at the condensate wavevector, taken constant.
        dipole_transverse: f64,
        dzz0: f64,
        j12: f64,
        dzz12: f64,
    },
    /// Uniform coupling inside each sample: `J_k = 0` away from `k = 0`.
    SmallSample {
        j0: f64,
        dipole_transverse: f64,
        dzz0: f64,
        j12: f64,
        dzz12: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SynchronismUnknown {
    /// Condensate wavevector, searched in `[lo, hi]`.
    K0 { lo: f64, hi: f64 },
    /// Cross exchange; the condition is affine in it.
    CrossExchange,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynchronismSolution {
    pub roots: Vec<f64>,
    /// Residual samples used to bracket the roots (empty for affine solves).
    pub scanned: Vec<(f64, f64)>,
}

const SCAN_POINTS: usize = 201;

impl SynchronismModel {
    pub fn jk(&self, k: f64) -> f64 {
        match *self {
            Self::Film {
                exchange, dimension, ..
            } => {
                let base = 2.0 * exchange * k.cos();
                if dimension >= 2 {
                    base + 2.0 * exchange
                } else {
                    base
                }
            }
            Self::SmallSample { j0, .. } => {
                if k == 0.0 {
                    j0
                } else {
                    0.0
                }
            }
        }
    }

    fn parts(&self) -> (f64, f64, f64, f64) {
        match *self {
            Self::Film {
                dipole_transverse,
                dzz0,
                j12,
                dzz12,
                ..
            }
            | Self::SmallSample {
                dipole_transverse,
                dzz0,
                j12,
                dzz12,
                ..
            } => (dipole_transverse, dzz0, j12, dzz12),
        }
    }

    /// Condition at condensate wavevector `k0`, left minus right.
    pub fn residual(&self, k0: f64) -> f64 {
        let (dperp, dzz0, j12, dzz12) = self.parts();
        self.jk(k0) + dperp - (self.jk(0.0) + dzz0 + j12 + dzz12)
    }

    /// `k0 = arccos(...)` for films, when the right side is reachable.
    pub fn closed_form_k0(&self) -> Option<f64> {
        match *self {
            Self::Film {
                exchange, dimension, ..
            } => {
                let (dperp, dzz0, j12, dzz12) = self.parts();
                let offset = if dimension >= 2 { 2.0 * exchange } else { 0.0 };
                let c = (self.jk(0.0) + dzz0 + j12 + dzz12 - dperp - offset) / (2.0 * exchange);
                (c.abs() <= 1.0).then(|| c.acos())
            }
            Self::SmallSample { .. } => None,
        }
    }

    fn with_j12(&self, value: f64) -> Self {
        let mut out = *self;
        match &mut out {
            Self::Film { j12, .. } | Self::SmallSample { j12, .. } => *j12 = value,
        }
        out
    }
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a).abs() < 1e-15 * (1.0 + m.abs()) {
            return m;
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Roots of a scalar function on `[lo, hi]` from a uniform scan followed by
/// bisection inside every bracketing cell.
pub fn scan_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> Result<SynchronismSolution> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Precondition(format!("invalid bracket [{lo}, {hi}]")));
    }
    let points = points.max(2);
    let scanned: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            (x, f(x))
        })
        .collect();
    let mut roots = Vec::new();
    for w in scanned.windows(2) {
        let ((x0, f0), (x1, f1)) = (w[0], w[1]);
        if f0 == 0.0 {
            if roots.last() != Some(&x0) {
                roots.push(x0);
            }
        } else if f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            roots.push(bisect(&f, x0, x1));
        }
    }
    if let Some(&(x, fx)) = scanned.last() {
        if fx == 0.0 {
            roots.push(x);
        }
    }
    if roots.is_empty() {
        return Err(Error::NoSolution { lo, hi, scanned });
    }
    Ok(SynchronismSolution { roots, scanned })
}

/// Solves the film or small-sample synchronism condition for one unknown.
pub fn solve_synchronism(model: &SynchronismModel, unknown: SynchronismUnknown, k0: f64) -> Result<SynchronismSolution> {
    match unknown {
        SynchronismUnknown::K0 { lo, hi } => {
            if let SynchronismModel::SmallSample { .. } = model {
                return Err(Error::Precondition(
                    "the uniform-coupling model has no wavevector dependence to solve for".into(),
                ));
            }
            let sol = scan_roots(|k| model.residual(k), lo, hi, SCAN_POINTS)?;
            let scale = 1.0 + model.jk(0.0).abs();
            for &r in &sol.roots {
                let res = model.residual(r);
                if res.abs() > SYNCHRONISM_TOL * scale {
                    return Err(Error::Precondition(format!(
                        "root {r} left residual {res:e} above tolerance"
                    )));
                }
            }
            Ok(sol)
        }
        SynchronismUnknown::CrossExchange => {
            // residual is  const - j12, exactly affine
            let at_zero = model.with_j12(0.0).residual(k0);
            Ok(SynchronismSolution {
                roots: vec![at_zero],
                scanned: Vec::new(),
            })
        }
    }
}

/// Perfect-square rewriting of the secular part under synchronism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SquareForm {
    /// Coefficients `(sqrt(2 l2 / l12), sqrt(2 l1 / l12))` of `M = a n2 - b n1`.
    pub m_coeffs: [f64; 2],
    pub lambda12: f64,
    /// `(E2 - E1) / (2 (sqrt l2 + sqrt l1))`.
    pub shift: f64,
    /// Coefficient of `n_t`.
    pub nt_coeff: f64,
    pub constant: f64,
    pub sqrt_lambda: [f64; 2],
}

pub fn square_form(params: &QubitParams) -> Result<SquareForm> {
    if !(params.lambda1 > 0.0 && params.lambda2 > 0.0) {
        return Err(Error::Precondition(format!(
            "square form needs positive nonlinearities, got {} and {}",
            params.lambda1, params.lambda2
        )));
    }
    let res = synchronism_residual(SynchronismInput::Params(params), SynchronismForm::Generic)?;
    if res.abs() > SYNCHRONISM_TOL {
        return Err(Error::Precondition(format!(
            "synchronism residual {res:e} exceeds {SYNCHRONISM_TOL:e}"
        )));
    }
    let (r1, r2) = (params.lambda1.sqrt(), params.lambda2.sqrt());
    let s = r1 + r2;
    let shift = (params.e2 - params.e1) / (2.0 * s);
    Ok(SquareForm {
        m_coeffs: [
            (2.0 * params.lambda2 / params.lambda12).sqrt(),
            (2.0 * params.lambda1 / params.lambda12).sqrt(),
        ],
        lambda12: params.lambda12,
        shift,
        nt_coeff: (r2 * params.e1 + r1 * params.e2) / s,
        constant: -shift * shift,
        sqrt_lambda: [r1, r2],
    })
}

impl SquareForm {
    /// Eigenvalue of `M` on `|n1, n2>`.
    pub fn m_value(&self, n1: u32, n2: u32) -> f64 {
        self.m_coeffs[0] * n2 as f64 - self.m_coeffs[1] * n1 as f64
    }

    /// `(sqrt l2 n2 - sqrt l1 n1)^2`.
    pub fn nonlinear(&self, n1: u32, n2: u32) -> f64 {
        let x = self.sqrt_lambda[1] * n2 as f64 - self.sqrt_lambda[0] * n1 as f64;
        x * x
    }

    /// `(sqrt(l12/2) M + shift)^2`.
    pub fn h_m(&self, n1: u32, n2: u32) -> f64 {
        let x = (self.lambda12 / 2.0).sqrt() * self.m_value(n1, n2) + self.shift;
        x * x
    }

    /// Full secular energy rebuilt from the square form.
    pub fn energy(&self, n1: u32, n2: u32) -> f64 {
        self.h_m(n1, n2) + self.nt_coeff * (n1 + n2) as f64 + self.constant
    }
}

/// Charge-qubit form `lambda (n - n_g)^2` of the symmetric model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricQubit {
    pub lambda: f64,
    pub e1: f64,
    pub e2: f64,
    /// Offset from completing the square: `(E2 - E1) / (4 lambda)`.
    pub n_g: f64,
    /// Coefficient of `n_t`: `(E1 + E2) / 2`.
    pub e_sum: f64,
    /// The alternative offset `2 (E1 + E2) / (E2 - E1)` per unit `n_t`, kept
    /// for comparison only; `None` when `E1 == E2`.
    pub alt_ng_per_nt: Option<f64>,
}

pub fn symmetric_qubit(params: &QubitParams) -> Result<SymmetricQubit> {
    let (l1, l2) = (params.lambda1, params.lambda2);
    if (l1 - l2).abs() > LAMBDA_SYMMETRY_TOL * l1.abs().max(l2.abs()) {
        return Err(Error::Precondition(format!(
            "nonlinearities differ: {l1} vs {l2}"
        )));
    }
    let lambda = 0.5 * (l1 + l2);
    if lambda <= 0.0 {
        return Err(Error::Precondition(format!(
            "symmetric qubit needs a positive nonlinearity, got {lambda}"
        )));
    }
    let res = synchronism_residual(SynchronismInput::Params(params), SynchronismForm::Generic)?;
    if res.abs() > SYNCHRONISM_TOL {
        return Err(Error::Precondition(format!(
            "synchronism residual {res:e} exceeds {SYNCHRONISM_TOL:e}"
        )));
    }
    let de = params.e2 - params.e1;
    Ok(SymmetricQubit {
        lambda,
        e1: params.e1,
        e2: params.e2,
        n_g: de / (4.0 * lambda),
        e_sum: 0.5 * (params.e1 + params.e2),
        alt_ng_per_nt: (de != 0.0).then(|| 2.0 * (params.e1 + params.e2) / de),
    })
}

impl SymmetricQubit {
    /// `-(E2 - E1) n / 2 + (E1 + E2) n_t / 2 + lambda n^2`.
    pub fn energy(&self, n1: u32, n2: u32) -> f64 {
        let n = n1 as f64 - n2 as f64;
        let nt = (n1 + n2) as f64;
        -0.5 * (self.e2 - self.e1) * n + self.e_sum * nt + self.lambda * n * n
    }

    /// `lambda (n - n_g)^2`.
    pub fn charge_form(&self, n1: u32, n2: u32) -> f64 {
        let x = n1 as f64 - n2 as f64 - self.n_g;
        self.lambda * x * x
    }

    /// Lowest-energy states of the shell, ties listed by increasing `n1`.
    pub fn ground_states(&self, n_t: u32) -> Vec<(u32, u32)> {
        let energies: Vec<f64> = (0..=n_t).map(|a| self.energy(a, n_t - a)).collect();
        let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = 1e-12 * (1.0 + min.abs());
        (0..=n_t)
            .filter(|&a| energies[a as usize] - min <= tol)
            .map(|a| (a, n_t - a))
            .collect()
    }

    /// Adjacent pair `(|n1, n2>, |n1+1, n2-1>)` containing a ground state,
    /// choosing the lower summed energy, ties toward smaller `n1`.
    pub fn qubit_pair(&self, n_t: u32) -> Option<((u32, u32), (u32, u32))> {
        if n_t == 0 {
            return None;
        }
        let mut best: Option<(f64, u32)> = None;
        for (g, _) in self.ground_states(n_t) {
            for a in [g.checked_sub(1), Some(g)].into_iter().flatten() {
                if a + 1 > n_t {
                    continue;
                }
                let e = self.energy(a, n_t - a) + self.energy(a + 1, n_t - a - 1);
                let tol = 1e-12 * (1.0 + e.abs());
                best = match best {
                    Some((be, ba)) if be < e - tol || ((be - e).abs() <= tol && ba <= a) => Some((be, ba)),
                    _ => Some((e, a)),
                };
            }
        }
        best.map(|(_, a)| ((a, n_t - a), (a + 1, n_t - a - 1)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonsecularK {
    pub n_t: u32,
    /// `kappa + kappa' (n_t - 1)`.
    pub k: Complex64,
    /// Closed form `(1/N) ((n_t - 1)/(4N) - sqrt(S1 S2)) T_cross`.
    pub closed_form: Complex64,
    pub discrepancy: f64,
}

pub fn nonsecular_k(params: &QubitParams, n_t: u32) -> NonsecularK {
    let k = params.kappa + params.kappa_prime * (n_t as f64 - 1.0);
    let nf = params.n as f64;
    let closed_form = params.cross_transverse
        * ((1.0 / nf) * ((n_t as f64 - 1.0) / (4.0 * nf) - (params.spins[0] * params.spins[1]).sqrt()));
    NonsecularK {
        n_t,
        k,
        closed_form,
        discrepancy: (k - closed_form).norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::{build_couplings, CouplingTable, ExchangeModel};
    use crate::couplings::Tensor;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn no_dipoles_give_linear_condensates() {
        let lat = LatticeSpec::rings(4, [0.5, 0.5], [0.3, 0.7]).unwrap();
        let t = build_couplings(&lat, &ExchangeModel::NearestNeighbor(1.0), &ExchangeModel::None, 0.0).unwrap();
        let f = FourierTable::full(&t, &lat).unwrap();
        let p = basic_params(&f, &lat).unwrap();
        assert_eq!(p.lambda1, 0.0);
        assert_eq!(p.lambda2, 0.0);
        assert_eq!(p.lambda12, 0.0);
        assert!((p.e1 - 0.3).abs() < 1e-14 && (p.e2 - 0.7).abs() < 1e-14);
        assert_eq!(p.kappa, c(0.0));
    }

    #[test]
    fn cross_exchange_sets_lambda12() {
        let lat = LatticeSpec::rings(4, [0.5, 0.5], [0.0, 0.0]).unwrap();
        let t = build_couplings(&lat, &ExchangeModel::NearestNeighbor(1.0), &ExchangeModel::Uniform(0.2), 0.0).unwrap();
        let f = FourierTable::full(&t, &lat).unwrap();
        let p = basic_params(&f, &lat).unwrap();
        // J_cross(0,0) = (1/N) sum = N * 0.2
        assert!((p.lambda12 - 0.2).abs() < 1e-14);
        assert!((p.kappa - c(-0.5 * 0.8)).norm() < 1e-14);
        assert!((p.kappa_prime - 0.8 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_from_dipolar_zero_mode() {
        // single-site samples: one-site "Fourier" sums are the site sums themselves
        let n = 10usize;
        let lat = LatticeSpec::rings(n, [0.5, 0.5], [0.0, 0.0]).unwrap();
        let mut t = CouplingTable::zeros(lat.n_sites());
        // every in-sample neighbour pair carries D = diag(1, 1, 0.5): Dxx_0 = Dyy_0 = 2, Dzz_0 = 1
        for m in 0..2 {
            let r = lat.sample_range(m);
            for a in 0..n {
                let i = r.start + a;
                let j = r.start + (a + 1) % n;
                t.set_dipole(i, j, Tensor::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, 0.5))).unwrap();
            }
        }
        let f = FourierTable::full(&t, &lat).unwrap();
        let p = basic_params(&f, &lat).unwrap();
        assert!((p.lambda1 - 0.05).abs() < 1e-14, "{}", p.lambda1);
        assert!((p.lambda2 - 0.05).abs() < 1e-14);
    }

    #[test]
    fn opposite_nonlinearities_refused() {
        let n = 4usize;
        let lat = LatticeSpec::rings(n, [0.5, 0.5], [0.0, 0.0]).unwrap();
        let mut t = CouplingTable::zeros(lat.n_sites());
        let diag = [[1.0, 1.0, 0.5], [0.2, 0.2, 1.0]];
        for m in 0..2 {
            let r = lat.sample_range(m);
            for a in 0..n {
                let d = diag[m];
                t.set_dipole(
                    r.start + a,
                    r.start + (a + 1) % n,
                    Tensor::from_diagonal(&nalgebra::Vector3::new(d[0], d[1], d[2])),
                )
                .unwrap();
            }
        }
        let f = FourierTable::full(&t, &lat).unwrap();
        assert!(matches!(basic_params(&f, &lat), Err(Error::SynchronismImpossible { .. })));
    }

    #[test]
    fn ring_double_well_lambda() {
        let n = 8usize;
        let lat = LatticeSpec::rings(n, [0.5, 0.5], [0.0, 0.0]).unwrap();
        let t = build_couplings(&lat, &ExchangeModel::NearestNeighbor(1.0), &ExchangeModel::None, 0.0).unwrap();
        let f = FourierTable::full(&t, &lat).unwrap();
        for idx in 1..4 {
            let k = WaveVector::new([idx, 0, 0], [n, 1, 1]);
            let p = doublewell_params(&f, &lat, [k, k]).unwrap();
            let want = (k.value()[0].cos() - 1.0) / n as f64;
            assert!((p.lambda1 - want).abs() < 1e-14);
            assert!((p.lambda2 - want).abs() < 1e-14);
        }
        let zero = WaveVector::zero([n, 1, 1]);
        let dw = doublewell_params(&f, &lat, [zero, zero]).unwrap();
        let basic = basic_params(&f, &lat).unwrap();
        assert!((dw.e1 - basic.e1).abs() < 1e-14);
        assert!((dw.lambda12 - basic.lambda12).abs() < 1e-14);
    }

    #[test]
    fn residual_examples() {
        let mut p = QubitParams::effective([0.0, 0.0], [0.3, 0.3], 0.7, c(0.0), 0.0);
        let r = synchronism_residual(SynchronismInput::Params(&p), SynchronismForm::Generic).unwrap();
        assert!((r - (0.7 - 0.6)).abs() < 1e-15);
        p.lambda1 = 1.0;
        p.lambda2 = 4.0;
        p.lambda12 = 4.0;
        assert_eq!(
            synchronism_residual(SynchronismInput::Params(&p), SynchronismForm::Generic).unwrap(),
            0.0
        );
        let raw = CondensateCouplings {
            j0: [3.0; 2],
            dzz0: [0.0; 2],
            dperp0: [0.0; 2],
            jk: [4.0; 2],
            dperpk: [1.0; 2],
            j12: 2.0,
            dzz12: 0.0,
        };
        assert_eq!(
            synchronism_residual(SynchronismInput::Raw(&raw), SynchronismForm::FilmsK0).unwrap(),
            0.0
        );
        p.lambda1 = -1.0;
        assert!(matches!(
            synchronism_residual(SynchronismInput::Params(&p), SynchronismForm::Generic),
            Err(Error::NegativeRadicand { .. })
        ));
    }

    #[test]
    fn same_sample_branches() {
        let mut raw = CondensateCouplings {
            j0: [1.0; 2],
            dzz0: [0.5; 2],
            dperp0: [1.0; 2],
            jk: [0.0; 2],
            dperpk: [0.0; 2],
            j12: 0.5,
            dzz12: 0.0,
        };
        let r = synchronism_residual(SynchronismInput::Raw(&raw), SynchronismForm::SameSamples).unwrap();
        assert!(r.abs() < 1e-15);
        assert!(synchronism_residual(SynchronismInput::Raw(&raw), SynchronismForm::NoTransverse).is_err());
        raw.dperp0 = [0.2; 2];
        raw.j0 = [-0.2; 2];
        assert!(synchronism_residual(SynchronismInput::Raw(&raw), SynchronismForm::SameSamples).is_err());
        let r = synchronism_residual(SynchronismInput::Raw(&raw), SynchronismForm::NoTransverse).unwrap();
        assert!(r.abs() < 1e-15);
    }

    fn film(j12: f64) -> SynchronismModel {
        SynchronismModel::Film {
            exchange: 1.0,
            dimension: 1,
            dipole_transverse: 0.3,
            dzz0: 0.1,
            j12,
            dzz12: 0.05,
        }
    }

    #[test]
    fn film_root_matches_arccos() {
        let model = film(-1.0);
        let want = model.closed_form_k0().unwrap();
        let sol = solve_synchronism(&model, SynchronismUnknown::K0 { lo: 0.0, hi: std::f64::consts::PI }, 0.0).unwrap();
        assert_eq!(sol.roots.len(), 1);
        assert!((sol.roots[0] - want).abs() < 1e-10);
        let sym = solve_synchronism(
            &model,
            SynchronismUnknown::K0 {
                lo: -std::f64::consts::PI,
                hi: std::f64::consts::PI,
            },
            0.0,
        )
        .unwrap();
        assert_eq!(sym.roots.len(), 2);
    }

    #[test]
    fn unreachable_film_condition() {
        let model = film(5.0);
        assert!(model.closed_form_k0().is_none());
        match solve_synchronism(&model, SynchronismUnknown::K0 { lo: 0.0, hi: 3.0 }, 0.0) {
            Err(Error::NoSolution { scanned, .. }) => assert_eq!(scanned.len(), SCAN_POINTS),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cross_exchange_is_affine() {
        let k0 = 1.1;
        let sol = solve_synchronism(&film(0.0), SynchronismUnknown::CrossExchange, k0).unwrap();
        assert!(film(sol.roots[0]).residual(k0).abs() < 1e-14);
    }

    #[test]
    fn square_form_examples() {
        let p = QubitParams::effective([0.0, 0.0], [1.0, 1.0], 2.0, c(0.0), 0.0);
        let s = square_form(&p).unwrap();
        assert_eq!(s.nonlinear(2, 5), 9.0);
        let p = QubitParams::effective([0.0, 0.0], [1.0, 4.0], 4.0, c(0.0), 0.0);
        let s = square_form(&p).unwrap();
        assert_eq!(s.nonlinear(3, 1), 1.0);
        assert_eq!(s.shift, 0.0);
        for (a, b) in [(0, 0), (3, 1), (2, 7)] {
            let m = s.m_value(a, b);
            assert!((s.h_m(a, b) - 2.0 * m * m).abs() < 1e-12);
        }
    }

    #[test]
    fn square_form_rebuilds_secular_energy() {
        let p = QubitParams::effective([0.3, -0.8], [0.2, 0.45], 2.0 * (0.2f64 * 0.45).sqrt(), c(0.0), 0.0);
        let s = square_form(&p).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                let want = p.secular_energy(a, b);
                assert!((s.energy(a, b) - want).abs() < 1e-12 * (1.0 + want.abs()));
            }
        }
    }

    #[test]
    fn symmetric_examples() {
        let p = QubitParams::effective([0.5, 0.5], [0.1, 0.1], 0.2, c(0.0), 0.0);
        let q = symmetric_qubit(&p).unwrap();
        assert_eq!(q.n_g, 0.0);
        assert_eq!(q.ground_states(6), vec![(3, 3)]);
        assert_eq!(q.ground_states(5), vec![(2, 3), (3, 2)]);
        assert!(q.alt_ng_per_nt.is_none());

        let p = QubitParams::effective([0.0, 0.4], [0.1, 0.1], 0.2, c(0.0), 0.0);
        let q = symmetric_qubit(&p).unwrap();
        assert!((q.n_g - 1.0).abs() < 1e-15);
        assert_eq!(q.ground_states(5), vec![(3, 2)]);
        let offsets: Vec<f64> = (0..=5).map(|a| q.charge_form(a, 5 - a) - q.energy(a, 5 - a)).collect();
        for o in &offsets {
            assert!((o - offsets[0]).abs() < 1e-12);
        }
        assert!((q.alt_ng_per_nt.unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn asymmetric_lambda_refused() {
        let p = QubitParams::effective([0.0, 0.0], [0.1, 0.2], 2.0 * 0.02f64.sqrt(), c(0.0), 0.0);
        assert!(symmetric_qubit(&p).is_err());
    }

    #[test]
    fn qubit_pair_prefers_degenerate_neighbours() {
        // n_g = 1 on an even shell: n = 0 and n = 2 are degenerate
        let p = QubitParams::effective([0.0, 0.4], [0.1, 0.1], 0.2, c(0.0), 0.0);
        let q = symmetric_qubit(&p).unwrap();
        assert_eq!(q.ground_states(6), vec![(3, 3), (4, 2)]);
        assert_eq!(q.qubit_pair(6), Some(((3, 3), (4, 2))));
    }

    #[test]
    fn nonsecular_examples() {
        let p = QubitParams::effective([0.0; 2], [0.0; 2], 0.0, c(0.7), 0.25);
        assert_eq!(nonsecular_k(&p, 1).k, c(0.7));
        let p = QubitParams::effective([0.0; 2], [0.0; 2], 0.0, c(0.0), 0.25);
        assert_eq!(nonsecular_k(&p, 5).k, c(1.0));
        let p = QubitParams::effective([0.0; 2], [0.0; 2], 0.0, c(0.0), 0.0);
        for nt in 1..10 {
            assert_eq!(nonsecular_k(&p, nt).k, c(0.0));
        }
    }
}
