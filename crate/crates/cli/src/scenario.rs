//! Turns a scenario into core objects.

use magqubit::{
    basic_params, build_couplings, doublewell_params, CondensateCouplings, CouplingTable, ExchangeModel,
    FourierTable, LatticeSpec, QubitParams, Sample, SampleShape, SynchronismModel, WaveVector,
};
use num_complex::Complex64;

use crate::config::{FilmConfig, ModelKind, Range, Scenario, Shape};
use crate::error::{CliError, CliResult, Context};

pub fn lattice(s: &Scenario) -> CliResult<LatticeSpec> {
    let l = &s.lattice;
    let out = match l.shape {
        Shape::Ring => {
            let shape = SampleShape::ring(l.size[0]);
            LatticeSpec::new(
                Sample::new(shape.clone(), [0.0; 3], l.spins[0], l.fields[0]),
                Sample::new(shape, [0.0, 0.0, l.separation], l.spins[1], l.fields[1]),
            )
        }
        Shape::Box => LatticeSpec::boxes(
            [l.size[0], l.size[1], l.size[2]],
            l.periodic.unwrap_or([true; 3]),
            l.separation,
            l.spins,
            l.fields,
        ),
        Shape::Film => LatticeSpec::film_pair(l.size[0], l.size[1], l.separation, l.spins, l.fields),
    };
    out.context("lattice")
}

fn exchange_model(value: f64, range: Range) -> ExchangeModel {
    if value == 0.0 {
        return ExchangeModel::None;
    }
    match range {
        Range::NearestNeighbor => ExchangeModel::NearestNeighbor(value),
        Range::Uniform => ExchangeModel::Uniform(value),
    }
}

pub fn couplings(s: &Scenario, lattice: &LatticeSpec) -> CliResult<CouplingTable> {
    let c = &s.couplings;
    build_couplings(
        lattice,
        &exchange_model(c.exchange, c.exchange_range),
        &exchange_model(c.cross_exchange, c.cross_range),
        c.dipole,
    )
    .context("couplings")
}

/// Condensate wavevectors of both samples.
pub fn condensate_k(s: &Scenario, lattice: &LatticeSpec) -> CliResult<[WaveVector; 2]> {
    let dims = [lattice.dims(0).context("lattice")?, lattice.dims(1).context("lattice")?];
    match s.model.kind {
        ModelKind::Basic | ModelKind::SmallSample => Ok([WaveVector::zero(dims[0]), WaveVector::zero(dims[1])]),
        ModelKind::DoubleWell | ModelKind::Films => {
            let idx = s
                .model
                .k0
                .ok_or_else(|| CliError::config("model.k0", "required for double-well and film models"))?;
            for m in 0..2 {
                if (0..3).any(|a| idx[a] >= dims[m][a]) {
                    return Err(CliError::config(
                        "model.k0",
                        &format!("index {idx:?} outside the grid {:?}", dims[m]),
                    ));
                }
            }
            Ok([WaveVector::new(idx, dims[0]), WaveVector::new(idx, dims[1])])
        }
    }
}

/// Fourier sums covering everything the condensate modes reference.
pub fn condensate_fourier(
    s: &Scenario,
    lattice: &LatticeSpec,
    table: &CouplingTable,
) -> CliResult<(FourierTable, [WaveVector; 2])> {
    let k = condensate_k(s, lattice)?;
    let sets = [vec![k[0], k[0].neg()], vec![k[1], k[1].neg()]];
    let f = FourierTable::for_modes(table, lattice, &sets[0], &sets[1]).context("fourier sums")?;
    Ok((f, k))
}

/// Qubit parameters, from the `effective` table when given, otherwise from the lattice.
pub fn qubit_params(s: &Scenario) -> CliResult<QubitParams> {
    if let Some(e) = &s.model.effective {
        return Ok(QubitParams::effective(
            e.energies,
            e.lambda,
            e.lambda12,
            Complex64::new(e.kappa[0], e.kappa[1]),
            e.kappa_prime,
        ));
    }
    let lat = lattice(s)?;
    let table = couplings(s, &lat)?;
    let (f, k) = condensate_fourier(s, &lat, &table)?;
    match s.model.kind {
        ModelKind::Basic | ModelKind::SmallSample => basic_params(&f, &lat).context("qubit parameters"),
        ModelKind::DoubleWell | ModelKind::Films => doublewell_params(&f, &lat, k).context("qubit parameters"),
    }
}

pub fn film_model(f: &FilmConfig) -> SynchronismModel {
    SynchronismModel::Film {
        exchange: f.exchange,
        dimension: f.dimension,
        dipole_transverse: f.dipole_transverse,
        dzz0: f.dzz0,
        j12: f.j12,
        dzz12: f.dzz12,
    }
}

/// Closed-form synchronism model: the `synchronism.film` table when given,
/// otherwise read off the lattice couplings.
pub fn synchronism_model(s: &Scenario) -> CliResult<Option<SynchronismModel>> {
    let film = s.synchronism.as_ref().and_then(|y| y.film.as_ref());
    match (s.model.kind, film) {
        (ModelKind::Films, Some(f)) => Ok(Some(film_model(f))),
        (ModelKind::SmallSample, Some(f)) => Ok(Some(SynchronismModel::SmallSample {
            j0: f.exchange,
            dipole_transverse: f.dipole_transverse,
            dzz0: f.dzz0,
            j12: f.j12,
            dzz12: f.dzz12,
        })),
        (ModelKind::Films | ModelKind::SmallSample, None) => {
            let c = raw_couplings(s)?;
            Ok(Some(if s.model.kind == ModelKind::Films {
                SynchronismModel::Film {
                    exchange: s.couplings.exchange,
                    dimension: if s.lattice.size.get(1).copied().unwrap_or(1) > 1 { 2 } else { 1 },
                    dipole_transverse: c.dperpk[0],
                    dzz0: c.dzz0[0],
                    j12: c.j12,
                    dzz12: c.dzz12,
                }
            } else {
                SynchronismModel::SmallSample {
                    j0: c.j0[0],
                    dipole_transverse: c.dperp0[0],
                    dzz0: c.dzz0[0],
                    j12: c.j12,
                    dzz12: c.dzz12,
                }
            }))
        }
        _ => Ok(None),
    }
}

pub fn raw_couplings(s: &Scenario) -> CliResult<CondensateCouplings> {
    let lat = lattice(s)?;
    let table = couplings(s, &lat)?;
    let (f, k) = condensate_fourier(s, &lat, &table)?;
    CondensateCouplings::from_fourier(&f, k).context("condensate couplings")
}
