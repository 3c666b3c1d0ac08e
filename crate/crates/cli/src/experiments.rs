//! The named experiments. Each returns an `Outcome` and never writes files.

use std::fmt::Write as _;

use magqubit::oracle::{
    condensate_projection, one_magnon_check, random_translation_invariant, realspace_kspace_equivalence,
};
use magqubit::{
    build_fock_matrix, exact_dispersion, magnon_energy, make_fock_space, nonsecular_k, propagate, scaling_study,
    solve_synchronism, square_form, symmetric_qubit, symmetry_report_for, synchronism_residual, two_level,
    CondensateCouplings, FourierTable, LatticeSpec, QubitModel, QubitParams, SynchronismForm, SynchronismInput,
    CVector, SparseMatrix, SynchronismModel, SynchronismUnknown, Trajectory, WaveVector, SYNCHRONISM_TOL,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Experiment, ModelKind, Scenario, Solve, SpaceKind, SweepVariable};
use crate::error::{CliError, CliResult, Context};
use crate::output::{f, opt, text, Check, Outcome};
use crate::scenario;

/// Absolute tolerance for matrix-level identities.
pub const MATRIX_TOL: f64 = 1e-12;
/// One-magnon energies, exact against boson.
pub const DISPERSION_TOL: f64 = 1e-10;
/// Relative entrywise tolerance of the real-space versus plane-wave comparison.
pub const EQUIVALENCE_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-9;
pub const ENERGY_TOL: f64 = 1e-9;
/// Relative tolerance between measured and predicted Rabi frequencies.
pub const RABI_TOL: f64 = 1e-6;
pub const CLOSED_FORM_TOL: f64 = 1e-10;
pub const SWEEP_ROOT_TOL: f64 = 1e-8;
pub const AFFINE_TOL: f64 = 1e-10;
/// Largest sample for which the coupled one-magnon check is run.
const ONE_MAGNON_MAX_SITES: usize = 12;

pub fn run(experiment: Experiment, s: &Scenario) -> CliResult<Outcome> {
    match experiment {
        Experiment::Dispersion => dispersion(s),
        Experiment::Synchronism => synchronism(s),
        Experiment::Qubit => qubit(s),
        Experiment::Evolve => evolve(s),
        Experiment::Sweep => sweep(s),
        Experiment::OracleCheck => oracle_check(s),
        Experiment::Scaling => scaling(s),
    }
}

#[derive(Debug, Serialize)]
struct DispersionSample {
    sample: usize,
    sz_conserving: bool,
    mean_field: f64,
    max_deviation: Option<f64>,
}

/// Boson dispersion of each sample, with exact diagonalization of the isolated
/// sample when its couplings conserve `S^z`.
fn dispersion_rows(
    lat: &LatticeSpec,
    table: &magqubit::CouplingTable,
    samples: &[usize],
    out: &mut Outcome,
) -> CliResult<Vec<DispersionSample>> {
    let zero = [
        WaveVector::zero(lat.dims(0).context("lattice")?),
        WaveVector::zero(lat.dims(1).context("lattice")?),
    ];
    let fourier = FourierTable::build(table, lat, &zero[..1], &zero[1..]).context("fourier sums")?;
    let mut csv = String::from("sample,k,kx,ky,kz,boson,mean_field,boson_isolated,exact_isolated,deviation\n");
    let mut summary = Vec::new();
    for &label in samples {
        if !(label == 1 || label == 2) {
            return Err(CliError::config("dispersion.samples", "entries must be 1 or 2"));
        }
        let m = label - 1;
        let mean = fourier.cross(&zero[0], &zero[1]).context("fourier sums")?.longitudinal().re * lat.spin(1 - m);
        let conserving = symmetry_report_for(table, lat, Some(m)).conserves_sz;
        let exact: Option<Vec<(WaveVector, f64)>> = if conserving {
            Some(exact_dispersion(lat, table, m).context("exact diagonalization")?)
        } else {
            None
        };
        let mut worst: Option<f64> = None;
        for (idx, k) in lat.k_grid(m).context("lattice")?.into_iter().enumerate() {
            let a = magnon_energy(&fourier, lat, m, &k).context("dispersion")?;
            let isolated = a - mean;
            let e = exact.as_ref().map(|v| {
                debug_assert_eq!(v[idx].0, k);
                v[idx].1
            });
            let dev = e.map(|e| (e - isolated).abs());
            if let Some(d) = dev {
                worst = Some(worst.map_or(d, |w: f64| w.max(d)));
            }
            let kv = k.value();
            let _ = writeln!(
                csv,
                "{label},{},{},{},{},{},{},{},{},{}",
                text(&k.label()),
                f(kv[0]),
                f(kv[1]),
                f(kv[2]),
                f(a),
                f(mean),
                f(isolated),
                opt(e),
                opt(dev)
            );
        }
        summary.push(DispersionSample {
            sample: label,
            sz_conserving: conserving,
            mean_field: mean,
            max_deviation: worst,
        });
    }
    out.table("dispersion.csv", csv);
    Ok(summary)
}

fn dispersion(s: &Scenario) -> CliResult<Outcome> {
    let lat = scenario::lattice(s)?;
    let table = scenario::couplings(s, &lat)?;
    let samples = s.dispersion.as_ref().map(|d| d.samples.clone()).unwrap_or_else(|| vec![1, 2]);
    let mut out = Outcome::default();
    let rows = dispersion_rows(&lat, &table, &samples, &mut out)?;
    for r in &rows {
        if let Some(d) = r.max_deviation {
            out.check(Check::at_most(&format!("dispersion_sample{}_vs_exact", r.sample), d, DISPERSION_TOL));
            out.headline(&format!("dispersion_deviation_sample{}", r.sample), d);
        }
    }
    out.set("samples", &rows);
    Ok(out)
}

fn oracle_check(s: &Scenario) -> CliResult<Outcome> {
    let cfg = s.oracle.clone().unwrap_or_default();
    let lat = scenario::lattice(s)?;
    let table = scenario::couplings(s, &lat)?;
    let mut out = Outcome::default();

    let rows = dispersion_rows(&lat, &table, &[1, 2], &mut out)?;
    let worst = rows.iter().filter_map(|r| r.max_deviation).fold(None, |a: Option<f64>, d| {
        Some(a.map_or(d, |a| a.max(d)))
    });
    if let Some(d) = worst {
        out.check(Check::at_most("dispersion_vs_exact", d, DISPERSION_TOL));
        out.headline("max_dispersion_deviation", d);
    }
    out.set("dispersion", &rows);

    let conserving = symmetry_report_for(&table, &lat, None).conserves_sz;
    if conserving && lat.n_per_sample() <= ONE_MAGNON_MAX_SITES {
        let c = one_magnon_check(&lat, &table).context("one-magnon check")?;
        out.check(Check::at_most("polarized_energy_vs_constant", c.ground_deviation, DISPERSION_TOL));
        out.check(Check::at_most("one_magnon_spectrum_vs_exact", c.deviation, DISPERSION_TOL));
        out.set("one_magnon", &c);
    }

    if s.model.kind == ModelKind::Basic {
        match condensate_projection(&lat, &table, 4) {
            Ok(c) => {
                out.check(Check::at_most("condensate_model_vs_projection", c.relative(), MATRIX_TOL));
                out.set("condensate_projection", &c);
            }
            Err(magqubit::Error::SynchronismImpossible { product }) => {
                out.set("condensate_projection", format!("skipped: lambda1 * lambda2 = {product:e} < 0"));
            }
            Err(e) => return Err(e).context("condensate projection"),
        }
    }

    let mut csv = String::from("index,seed,sites_per_sample,shell,dim,scale,deviation,relative\n");
    let results: Vec<CliResult<(u64, usize, u32, magqubit::oracle::MatrixComparison)>> = (0..cfg.random_configs)
        .into_par_iter()
        .map(|i| {
            let seed = s.seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
            let shell = 1 + (i as u32 % cfg.max_shell);
            let (l, t) = random_translation_invariant(seed).context("random configuration")?;
            let c = realspace_kspace_equivalence(&l, &t, shell).context("equivalence")?;
            Ok((seed, l.n_per_sample(), shell, c))
        })
        .collect();
    let mut worst_rel = 0.0f64;
    for (i, r) in results.into_iter().enumerate() {
        let (seed, n, shell, c) = r?;
        worst_rel = worst_rel.max(c.relative());
        let _ = writeln!(
            csv,
            "{i},{seed},{n},{shell},{},{},{},{}",
            c.dim,
            f(c.scale),
            f(c.deviation),
            f(c.relative())
        );
    }
    if cfg.random_configs > 0 {
        out.check(Check::at_most("realspace_vs_plane_wave", worst_rel, EQUIVALENCE_TOL));
        out.headline("max_equivalence_deviation", worst_rel);
        out.table("equivalence.csv", csv);
    }
    out.set("random_configs", cfg.random_configs);
    Ok(out)
}

fn default_form(kind: ModelKind) -> SynchronismForm {
    match kind {
        ModelKind::Basic => SynchronismForm::Generic,
        ModelKind::DoubleWell => SynchronismForm::DoubleWell,
        ModelKind::SmallSample => SynchronismForm::SmallSample,
        ModelKind::Films => SynchronismForm::Films,
    }
}

fn selected_form(s: &Scenario) -> SynchronismForm {
    s.synchronism
        .as_ref()
        .and_then(|y| y.form.as_deref())
        .and_then(SynchronismForm::parse)
        .unwrap_or_else(|| default_form(s.model.kind))
}

fn analytic_only(s: &Scenario) -> bool {
    s.synchronism.as_ref().is_some_and(|y| y.film.is_some())
        && matches!(s.model.kind, ModelKind::Films | ModelKind::SmallSample)
}

/// Residual of the selected form: from raw couplings when the form needs
/// them, otherwise from the qubit parameters.
fn form_residual(
    form: SynchronismForm,
    params: Option<&QubitParams>,
    raw: Option<&CondensateCouplings>,
) -> magqubit::Result<f64> {
    match (form, params, raw) {
        (SynchronismForm::Generic | SynchronismForm::DoubleWell, Some(p), _) => {
            synchronism_residual(SynchronismInput::Params(p), form)
        }
        (_, _, Some(c)) => synchronism_residual(SynchronismInput::Raw(c), form),
        _ => Err(magqubit::Error::Precondition(format!(
            "form '{}' needs couplings derived from a lattice",
            form.name()
        ))),
    }
}

fn with_j12(model: &SynchronismModel, value: f64) -> SynchronismModel {
    let mut m = *model;
    match &mut m {
        SynchronismModel::Film { j12, .. } | SynchronismModel::SmallSample { j12, .. } => *j12 = value,
    }
    m
}

fn synchronism(s: &Scenario) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let form = selected_form(s);
    out.set("form", form.name());

    if !analytic_only(s) {
        let params = scenario::qubit_params(s).ok();
        let raw = if s.model.effective.is_none() {
            Some(scenario::raw_couplings(s)?)
        } else {
            None
        };
        let mut forms = serde_json::Map::new();
        for candidate in SynchronismForm::ALL {
            let v = match form_residual(candidate, params.as_ref(), raw.as_ref()) {
                Ok(r) => crate::output::number(r),
                Err(e) => serde_json::Value::String(e.to_string()),
            };
            forms.insert(candidate.name().into(), v);
        }
        out.set("residuals", forms);
        if let Some(c) = &raw {
            out.set("couplings", c);
        }
        if let Some(p) = &params {
            out.set("params", p);
        }
        if let Ok(r) = form_residual(form, params.as_ref(), raw.as_ref()) {
            out.headline("residual", r);
        }
    }

    let Some(model) = scenario::synchronism_model(s)? else {
        return Ok(out);
    };
    out.set("model", model);
    let y = s.synchronism.clone();
    let solve = y.as_ref().and_then(|y| y.solve).unwrap_or(match model {
        SynchronismModel::Film { .. } => Solve::K0,
        SynchronismModel::SmallSample { .. } => Solve::CrossExchange,
    });
    let k0 = y.as_ref().and_then(|y| y.k0).unwrap_or(0.0);
    match solve {
        Solve::K0 => {
            let [lo, hi] = y
                .as_ref()
                .and_then(|y| y.k_range)
                .unwrap_or([0.0, std::f64::consts::PI]);
            let sol = solve_synchronism(&model, SynchronismUnknown::K0 { lo, hi }, k0).context("synchronism solve")?;
            let mut csv = String::from("k,residual\n");
            for (k, r) in &sol.scanned {
                let _ = writeln!(csv, "{},{}", f(*k), f(*r));
            }
            out.table("synchronism_scan.csv", csv);
            let residuals: Vec<f64> = sol.roots.iter().map(|&r| model.residual(r)).collect();
            let worst = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
            out.check(Check::at_most("residual_at_roots", worst, SYNCHRONISM_TOL));
            out.headline("residual", worst);
            out.headline("k0", sol.roots[0]);
            if let Some(closed) = model.closed_form_k0() {
                let nearest = sol
                    .roots
                    .iter()
                    .map(|r| (r - closed).abs())
                    .fold(f64::INFINITY, f64::min);
                out.check(Check::at_most("root_vs_closed_form", nearest, CLOSED_FORM_TOL));
                out.set("closed_form_k0", closed);
            }
            out.set("roots", &sol.roots);
            out.set("root_residuals", residuals);
        }
        Solve::CrossExchange => {
            let sol = solve_synchronism(&model, SynchronismUnknown::CrossExchange, k0).context("synchronism solve")?;
            let j12 = sol.roots[0];
            let r = with_j12(&model, j12).residual(k0);
            out.check(Check::at_most("residual_at_root", r.abs(), SYNCHRONISM_TOL));
            out.headline("residual", r);
            out.headline("j12", j12);
            out.set("roots", &sol.roots);
        }
    }
    Ok(out)
}

/// `(E2 - E1) / (2 (l1 + l2))`: the gate offset, equal to `(E2 - E1) / (4 l)`
/// for equal nonlinearities.
pub fn gate_offset(p: &QubitParams) -> Option<f64> {
    let s = p.lambda1 + p.lambda2;
    (s != 0.0).then(|| (p.e2 - p.e1) / (2.0 * s))
}

fn qubit(s: &Scenario) -> CliResult<Outcome> {
    let p = scenario::qubit_params(s)?;
    let n_t = s.qubit.as_ref().map(|q| q.n_t).unwrap_or(10);
    let mut out = Outcome::default();
    out.set("params", &p);
    out.headline("lambda1", p.lambda1);
    out.headline("lambda2", p.lambda2);
    out.headline("lambda12", p.lambda12);
    if let Some(ng) = gate_offset(&p) {
        out.headline("n_g", ng);
    }
    match synchronism_residual(SynchronismInput::Params(&p), SynchronismForm::Generic) {
        Ok(r) => {
            out.headline("residual", r);
            out.set("residual", r);
        }
        Err(e) => out.set("residual", e.to_string()),
    }
    match square_form(&p) {
        Ok(sq) => out.set("square_form", sq),
        Err(e) => out.set("square_form", e.to_string()),
    }
    out.set("nonsecular", nonsecular_k(&p, n_t));

    let mut csv = String::from("n1,n2,n,energy,second_difference\n");
    let energies: Vec<f64> = (0..=n_t).map(|a| p.secular_energy(a, n_t - a)).collect();
    let scale = energies.iter().fold(1.0f64, |a, e| a.max(e.abs()));
    for a in 0..=n_t {
        let i = a as usize;
        let second = (i >= 1 && i < n_t as usize).then(|| energies[i + 1] - 2.0 * energies[i] + energies[i - 1]);
        let _ = writeln!(
            csv,
            "{a},{},{},{},{}",
            n_t - a,
            a as i64 - (n_t - a) as i64,
            f(energies[i]),
            opt(second)
        );
    }
    out.table("levels.csv", csv);

    if let Ok(q) = symmetric_qubit(&p) {
        out.set("symmetric", q);
        let worst = (1..n_t as usize)
            .map(|i| (energies[i + 1] - 2.0 * energies[i] + energies[i - 1] - 8.0 * q.lambda).abs())
            .fold(0.0, f64::max);
        if n_t >= 2 {
            out.check(Check::at_most("second_difference_vs_8_lambda", worst / scale, MATRIX_TOL));
        }
        if let Some((a, _)) = q.qubit_pair(n_t) {
            out.set("qubit_pair", [[a.0, a.1], [a.0 + 1, a.1 - 1]]);
            if let Ok(m) = two_level(&p, a.0, a.1) {
                out.headline("g", m.g);
                out.set("two_level", m);
            }
        }
    }

    let space = magqubit::shell_space(&p, n_t).context("shell space")?;
    let h = build_fock_matrix(&p.hamiltonian(), &space).context("fock matrix")?;
    out.check(Check::at_most("hermiticity", h.hermiticity_residual(), MATRIX_TOL));
    out.check(Check::at_most("number_commutator", h.commutator_with_diagonal(&space.total_number()), MATRIX_TOL));
    Ok(out)
}

fn occupation_label(occ: &[u32]) -> String {
    let parts: Vec<String> = occ.iter().map(|n| n.to_string()).collect();
    format!("p_{}", parts.join("_"))
}

fn evolve(s: &Scenario) -> CliResult<Outcome> {
    let cfg = s.evolve.clone().ok_or_else(|| CliError::config("evolve", "section [evolve] is required"))?;
    let p = scenario::qubit_params(s)?;
    let modes = p.modes();
    if cfg.initial.len() != modes.len() {
        return Err(CliError::config(
            "evolve.initial",
            &format!("expected {} occupations, one per condensate mode", modes.len()),
        ));
    }
    let target = match (&cfg.target, modes.len()) {
        (Some(t), _) => t.clone(),
        (None, 2) if cfg.initial[1] > 0 => vec![cfg.initial[0] + 1, cfg.initial[1] - 1],
        _ => return Err(CliError::config("evolve.target", "required unless a magnon can hop from sample 2")),
    };
    if target.len() != modes.len() {
        return Err(CliError::config("evolve.target", "length must match evolve.initial"));
    }
    let n_t: u32 = cfg.initial.iter().sum();
    let space = match cfg.space {
        SpaceKind::Pair => {
            if modes.len() != 2 || target != vec![cfg.initial[0] + 1, cfg.initial[1].wrapping_sub(1)] {
                return Err(CliError::config(
                    "evolve.space",
                    "pair spaces need the two-mode model and target = initial + (1, -1)",
                ));
            }
            magqubit::isolated_pair_space(&p, cfg.initial[0], cfg.initial[1]).context("pair space")?
        }
        SpaceKind::Shell => make_fock_space(modes.clone(), vec![n_t; modes.len()], Some(n_t)).context("shell space")?,
        SpaceKind::Caps => {
            let caps = cfg.caps.clone().unwrap_or_default();
            if caps.len() != modes.len() {
                return Err(CliError::config("evolve.caps", "one cap per condensate mode"));
            }
            make_fock_space(modes.clone(), caps, None).context("capped space")?
        }
    };
    let h = build_fock_matrix(&p.hamiltonian(), &space).context("fock matrix")?;
    let mut parts = Vec::new();
    let mut start = 0.0;
    for seg in &cfg.segments {
        // condensate energies shift one-to-one with the field
        let mut q = p.clone();
        q.e1 += seg.fields[0] - s.lattice.fields[0];
        q.e2 += seg.fields[1] - s.lattice.fields[1];
        let m = build_fock_matrix(&q.hamiltonian(), &space).context("segment fock matrix")?;
        parts.push((m, start, (start + seg.duration).min(cfg.t_max)));
        start += seg.duration;
    }
    if start < cfg.t_max {
        parts.push((h.clone(), start, cfg.t_max));
    }
    let from = space
        .index_of(&cfg.initial)
        .ok_or_else(|| CliError::config("evolve.initial", "state outside the Fock space"))?;
    let to = space
        .index_of(&target)
        .ok_or_else(|| CliError::config("evolve.target", "state outside the Fock space"))?;

    let mut out = Outcome::default();
    out.set("params", &p);
    out.set("dimension", space.dim());
    out.check(Check::at_most("hermiticity", h.hermiticity_residual(), MATRIX_TOL));
    out.check(Check::at_most("number_commutator", h.commutator_with_diagonal(&space.total_number()), MATRIX_TOL));

    let times: Vec<f64> = (0..=cfg.steps).map(|i| cfg.t_max * i as f64 / cfg.steps as f64).collect();
    let mut psi = CVector::zeros(space.dim());
    psi[from] = Complex64::new(1.0, 0.0);
    let (traj, energy_drift) = propagate_piecewise(&parts, &psi, &times)?;
    let (max_leak, final_leak) = magqubit::leakage(&traj, &[from, to]);
    out.check(Check::at_most("norm_drift", traj.max_norm_drift(), NORM_TOL));
    out.check(Check::at_most("energy_drift", energy_drift, ENERGY_TOL));
    if !cfg.segments.is_empty() {
        let bounds: Vec<[f64; 2]> = parts.iter().map(|(_, a, b)| [*a, *b]).collect();
        out.set("segments", bounds);
    }
    out.headline("leakage", max_leak);
    out.set("max_leakage", max_leak);
    out.set("final_leakage", final_leak);
    let max_target = (0..times.len()).map(|i| traj.population(i, to)).fold(0.0, f64::max);
    out.set("max_target_population", max_target);
    out.table(
        "trajectory.csv",
        traj.to_csv(&[(from, occupation_label(&cfg.initial)), (to, occupation_label(&target))]),
    );

    let is_hop = modes.len() == 2 && cfg.initial[1] > 0 && target == vec![cfg.initial[0] + 1, cfg.initial[1] - 1];
    if is_hop && matches!(p.model, QubitModel::Basic) {
        let model = two_level(&p, cfg.initial[0], cfg.initial[1]).context("two-level model")?;
        out.headline("g", model.g);
        out.set("two_level", model);
        if space.dim() <= magqubit::DENSE_PROPAGATION_LIMIT && model.g > 0.0 && cfg.segments.is_empty() {
            match magqubit::measure_rabi_frequency(&h, from, to, cfg.t_max, 2001) {
                Ok(w) => {
                    out.headline("rabi_frequency", w);
                    out.set("measured_rabi_frequency", w);
                    if cfg.space == SpaceKind::Pair {
                        let predicted = model.rabi_frequency();
                        out.check(Check::at_most(
                            "rabi_frequency_vs_two_level",
                            (w - predicted).abs() / predicted,
                            RABI_TOL,
                        ));
                    }
                }
                Err(e) => out.set("measured_rabi_frequency", e.to_string()),
            }
        }
    }
    Ok(out)
}

/// Evolution under `(h, start, end)` pieces covering the time grid, sampled
/// at the grid points. Energy drift is measured within each piece.
fn propagate_piecewise(
    parts: &[(SparseMatrix, f64, f64)],
    psi0: &CVector,
    times: &[f64],
) -> CliResult<(Trajectory, f64)> {
    let mut traj = Trajectory {
        times: Vec::new(),
        amplitudes: Vec::new(),
        norm_drift: Vec::new(),
        energy: Vec::new(),
    };
    let mut psi = psi0.clone();
    let mut drift = 0.0f64;
    let mut next = 0;
    for (i, (h, start, end)) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        let mut local = Vec::new();
        while next < times.len() && (times[next] <= *end || last) {
            local.push(times[next] - start);
            next += 1;
        }
        let recorded = local.len();
        if local.last().is_none_or(|t| *t < end - start) {
            local.push(end - start);
        }
        let part = propagate(h, &psi, &local).context("propagation")?;
        drift = drift.max(part.energy_drift());
        psi = part.amplitudes.last().expect("non-empty").clone();
        traj.times.extend(local[..recorded].iter().map(|t| t + start));
        traj.amplitudes.extend(part.amplitudes.into_iter().take(recorded));
        traj.norm_drift.extend(part.norm_drift.into_iter().take(recorded));
        traj.energy.extend(part.energy.into_iter().take(recorded));
    }
    Ok((traj, drift))
}

fn scaling(s: &Scenario) -> CliResult<Outcome> {
    let p = scenario::qubit_params(s)?;
    let occ: Vec<(u32, u32)> = s
        .scaling
        .as_ref()
        .map(|c| c.occupations.iter().map(|o| (o[0], o[1])).collect())
        .unwrap_or_else(|| vec![(0, 1), (0, 4), (0, 9), (0, 100)]);
    if p.modes().len() != 2 {
        return Err(CliError::config("model.kind", "scaling needs the two-mode model"));
    }
    let rows = scaling_study(&p, &occ).context("scaling study")?;
    let mut out = Outcome::default();
    let base = rows.first().map(|r| r.measured_frequency).unwrap_or(0.0);
    let mut csv = String::from("n1,n2,n_t,g,delta,predicted_frequency,measured_frequency,max_transfer,ratio\n");
    let mut worst = 0.0f64;
    for r in &rows {
        if r.predicted_frequency > 0.0 {
            worst = worst.max((r.measured_frequency - r.predicted_frequency).abs() / r.predicted_frequency);
        }
        let ratio = (base > 0.0).then(|| r.measured_frequency / base);
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            r.n1,
            r.n2,
            r.n_t,
            f(r.g),
            f(r.delta),
            f(r.predicted_frequency),
            f(r.measured_frequency),
            f(r.max_transfer),
            opt(ratio)
        );
    }
    out.check(Check::at_most("measured_vs_predicted_frequency", worst, RABI_TOL));
    if let Some(r) = rows.first() {
        out.headline("g", r.g);
    }
    out.set("rows", &rows);
    out.set("params", &p);
    out.table("scaling.csv", csv);
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<QubitParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn apply(s: &mut Scenario, var: SweepVariable, value: f64) {
    match var {
        SweepVariable::Field1 => s.lattice.fields[0] = value,
        SweepVariable::Field2 => s.lattice.fields[1] = value,
        SweepVariable::Separation => s.lattice.separation = value,
        SweepVariable::Exchange => s.couplings.exchange = value,
        SweepVariable::CrossExchange => s.couplings.cross_exchange = value,
        SweepVariable::Dipole => s.couplings.dipole = value,
        SweepVariable::K0 => {
            if let Some(y) = s.synchronism.as_mut() {
                y.k0 = Some(value);
            }
        }
    }
}

/// Residual of the scenario's synchronism condition at one sweep value.
fn sweep_point(base: &Scenario, var: SweepVariable, value: f64) -> CliResult<(Option<QubitParams>, f64)> {
    let mut s = base.clone();
    apply(&mut s, var, value);
    if var == SweepVariable::K0 {
        let model = scenario::synchronism_model(&s)?
            .ok_or_else(|| CliError::config("sweep.variable", "k0 sweeps need the film or small-sample model"))?;
        return Ok((None, model.residual(value)));
    }
    let p = scenario::qubit_params(&s)?;
    let form = selected_form(&s);
    let raw = if s.model.effective.is_none() && !matches!(form, SynchronismForm::Generic) {
        Some(scenario::raw_couplings(&s)?)
    } else {
        None
    };
    let r = form_residual(form, Some(&p), raw.as_ref()).context("synchronism residual")?;
    Ok((Some(p), r))
}

fn sweep(s: &Scenario) -> CliResult<Outcome> {
    let cfg = s.sweep.clone().ok_or_else(|| CliError::config("sweep", "section [sweep] is required"))?;
    let values = cfg.values()?;
    let var = cfg.variable;
    if var == SweepVariable::K0 && !matches!(s.model.kind, ModelKind::Films | ModelKind::SmallSample) {
        return Err(CliError::config("sweep.variable", "k0 sweeps need the film or small-sample model"));
    }
    let rows: Vec<SweepRow> = values
        .par_iter()
        .enumerate()
        .map(|(index, &value)| match sweep_point(s, var, value) {
            Ok((params, residual)) => SweepRow {
                index,
                value,
                n_g: params.as_ref().and_then(gate_offset),
                params,
                residual: Some(residual),
                error: None,
            },
            Err(e) => SweepRow {
                index,
                value,
                params: None,
                residual: None,
                n_g: None,
                error: Some(e.to_string()),
            },
        })
        .collect();

    let mut out = Outcome::default();
    let mut csv = String::from(
        "index,value,e1,e2,lambda1,lambda2,lambda12,kappa_re,kappa_im,kappa_prime,residual,n_g,error\n",
    );
    for r in &rows {
        let p = r.params.as_ref();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.index,
            f(r.value),
            opt(p.map(|p| p.e1)),
            opt(p.map(|p| p.e2)),
            opt(p.map(|p| p.lambda1)),
            opt(p.map(|p| p.lambda2)),
            opt(p.map(|p| p.lambda12)),
            opt(p.map(|p| p.kappa.re)),
            opt(p.map(|p| p.kappa.im)),
            opt(p.map(|p| p.kappa_prime)),
            opt(r.residual),
            opt(r.n_g),
            text(r.error.as_deref().unwrap_or(""))
        );
    }
    out.table("sweep.csv", csv);
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    out.set("variable", var.name());
    out.set("points", rows.len());
    out.set("failed_points", failed);

    // sign changes of the residual, refined on the same pipeline
    let mut roots = Vec::new();
    for w in rows.windows(2) {
        let (Some(r0), Some(r1)) = (w[0].residual, w[1].residual) else {
            continue;
        };
        if r0 == 0.0 {
            roots.push(w[0].value);
        } else if r1 != 0.0 && (r0 < 0.0) != (r1 < 0.0) {
            let g = |x: f64| sweep_point(s, var, x).map(|(_, r)| r);
            roots.push(refine(&g, w[0].value, w[1].value, r0)?);
        }
    }
    if let Some(&(Some(r), v)) = rows.last().map(|r| (r.residual, r.value)).as_ref() {
        if r == 0.0 && roots.last() != Some(&v) {
            roots.push(v);
        }
    }
    out.set("sign_change_roots", &roots);
    if let Some(&r) = roots.first() {
        out.headline("root", r);
    }
    if var == SweepVariable::K0 && !roots.is_empty() {
        let model = scenario::synchronism_model(s)?.expect("checked above");
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sol = solve_synchronism(&model, SynchronismUnknown::K0 { lo, hi }, 0.0).context("synchronism solve")?;
        let worst = roots
            .iter()
            .map(|r| sol.roots.iter().map(|x| (x - r).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        out.check(Check::at_most("sweep_root_vs_solver", worst, SWEEP_ROOT_TOL));
        out.set("solver_roots", &sol.roots);
    }
    if matches!(var, SweepVariable::Field1 | SweepVariable::Field2) {
        let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.n_g.map(|g| (r.value, g))).collect();
        if pts.len() >= 3 {
            let dev = affine_residual(&pts);
            let scale = pts.iter().fold(1.0f64, |a, p| a.max(p.1.abs()));
            out.check(Check::at_most("n_g_affine_in_field", dev / scale, AFFINE_TOL));
        }
    }
    out.set("rows", &rows);
    Ok(out)
}

fn refine<F: Fn(f64) -> CliResult<f64>>(g: &F, mut a: f64, mut b: f64, mut ga: f64) -> CliResult<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= 1e-15 * (1.0 + m.abs()) {
            break;
        }
        let gm = g(m)?;
        if gm == 0.0 {
            return Ok(m);
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Largest deviation from the least-squares line through `pts`.
pub fn affine_residual(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    pts.iter()
        .map(|p| (p.1 - (my + slope * (p.0 - mx))).abs())
        .fold(0.0, f64::max)
}
