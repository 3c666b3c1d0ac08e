//! Acceptance suite: one PASS/FAIL line per criterion, run with
//! `cargo test -p magqubit-cli --test acceptance`.

use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use magqubit::dynamics::Spectral;
use magqubit::oracle::{dispersion_check, random_translation_invariant, realspace_kspace_equivalence};
use magqubit::{
    basis_state, build_fock_matrix, isolated_pair_space, kspace_coefficients, make_fock_space,
    measure_rabi_frequency, propagate, scaling_study, shell_leakage, shell_space, solve_synchronism,
    square_form, symmetric_qubit, two_level, CVector, Complex64, FockSpace, FourierTable, QubitParams,
    SparseMatrix, SynchronismModel, SynchronismUnknown,
};
use magqubit_cli::config::{load_scenario, Experiment};
use magqubit_cli::{experiments, scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DISPERSION_TOL: f64 = 1e-10;
const DISPERSION_BUDGET: Duration = Duration::from_secs(10);
const EQUIVALENCE_TOL: f64 = 1e-10;
const EQUIVALENCE_CONFIGS: u64 = 24;
const EQUIVALENCE_BUDGET: Duration = Duration::from_secs(30);
const SQUARE_TOL: f64 = 1e-12;
const SQUARE_CASES: usize = 100;
const SQUARE_BUDGET: Duration = Duration::from_secs(1);
const SECOND_DIFFERENCE_TOL: f64 = 1e-12;
const SCALING_TOL: f64 = 1e-6;
const AMPLITUDE_TOL: f64 = 1e-8;
const TRANSFER_TOL: f64 = 1e-6;
const PROTECTED_LEAKAGE_MAX: f64 = 0.05;
const UNPROTECTED_LEAKAGE_MIN: f64 = 0.5;
const CLOSED_FORM_TOL: f64 = 1e-10;
const SWEEP_TOL: f64 = 1e-8;
const MATRIX_TOL: f64 = 1e-12;
const DRIFT_TOL: f64 = 1e-9;
const TRUNCATION_TOL: f64 = 1e-8;

type Verdict = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Verdict);

fn configs() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn preset(name: &str) -> QubitParams {
    let s = load_scenario(&configs().join(format!("{name}.toml"))).unwrap();
    scenario::qubit_params(&s).unwrap()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn hp_dispersion() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in [4, 6, 8, 10] {
        for spin in [0.5, 1.0] {
            for field in [0.0, 0.5] {
                worst = worst.max(dispersion_check(n, spin, field, 1.0).map_err(err)?.deviation);
            }
        }
    }
    let took = start.elapsed();
    Ok((
        worst <= DISPERSION_TOL && took < DISPERSION_BUDGET,
        format!("max deviation {worst:.2e} (tol {DISPERSION_TOL:e}), {took:.2?}"),
    ))
}

fn realspace_kspace() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..EQUIVALENCE_CONFIGS {
        let (lat, table) = random_translation_invariant(seed).map_err(err)?;
        assert!(lat.n_per_sample() <= 6);
        let shell = 1 + (seed % 3) as u32;
        worst = worst.max(realspace_kspace_equivalence(&lat, &table, shell).map_err(err)?.relative());
    }
    let took = start.elapsed();
    Ok((
        worst <= EQUIVALENCE_TOL && took < EQUIVALENCE_BUDGET,
        format!("{EQUIVALENCE_CONFIGS} configs, max relative deviation {worst:.2e}, {took:.2?}"),
    ))
}

fn perfect_square() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut worst, mut worst_nonlinear): (f64, f64) = (0.0, 0.0);
    let mut states = 0usize;
    for _ in 0..SQUARE_CASES {
        let l1 = rng.gen_range(0.01..1.0);
        let l2 = rng.gen_range(0.01..1.0);
        let e = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let p = QubitParams::effective(e, [l1, l2], 2.0 * f64::sqrt(l1 * l2), Complex64::new(0.0, 0.0), 0.0);
        let sf = square_form(&p).map_err(err)?;
        for n_t in 0..=20u32 {
            for a in 0..=n_t {
                let b = n_t - a;
                let lhs = p.secular_energy(a, b);
                worst = worst.max((lhs - sf.energy(a, b)).abs() / lhs.abs().max(1.0));
                let (x, y) = (a as f64, b as f64);
                let nl = l1 * x * x + l2 * y * y - p.lambda12 * x * y;
                worst_nonlinear = worst_nonlinear.max((nl - sf.nonlinear(a, b)).abs() / nl.abs().max(1.0));
                states += 1;
            }
        }
    }
    let took = start.elapsed();
    let dev = worst.max(worst_nonlinear);
    Ok((
        dev <= SQUARE_TOL && took < SQUARE_BUDGET,
        format!(
            "{SQUARE_CASES} cases, {states} states, energy {worst:.2e}, nonlinear {worst_nonlinear:.2e} (relative to max(1,|E|)), {took:.2?}"
        ),
    ))
}

fn anharmonic_spectrum() -> Verdict {
    let n_t = 20u32;
    let effective = QubitParams::effective([0.3, 0.67], [0.1, 0.1], 0.2, Complex64::new(0.01, 0.0), 0.0);
    let mut worst: f64 = 0.0;
    let mut lambdas = Vec::new();
    for p in [effective, preset("basic-box")] {
        let q = symmetric_qubit(&p).map_err(err)?;
        lambdas.push(q.lambda);
        let e: Vec<f64> = (0..=n_t).map(|a| p.secular_energy(a, n_t - a)).collect();
        for a in 1..n_t as usize {
            let d2 = e[a + 1] - 2.0 * e[a] + e[a - 1];
            worst = worst.max((d2 - 8.0 * q.lambda).abs());
        }
    }
    Ok((
        worst <= SECOND_DIFFERENCE_TOL,
        format!("n_t = {n_t}, lambda {lambdas:.4?}, max |d2E - 8 lambda| {worst:.2e}"),
    ))
}

fn sqrt_n_enhancement() -> Verdict {
    let p = QubitParams::effective([0.0, 0.0], [0.0, 0.0], 0.0, Complex64::new(0.004, 0.003), 0.0);
    let rows = scaling_study(&p, &[(0, 1), (0, 4), (0, 9), (0, 100)]).map_err(err)?;
    let base = rows[0].measured_frequency;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_g: f64 = 0.0;
    for (row, want) in rows.iter().zip([1.0, 2.0, 3.0, 10.0]) {
        if row.delta != 0.0 {
            return Ok((false, format!("detuning {} at ({}, {})", row.delta, row.n1, row.n2)));
        }
        worst_ratio = worst_ratio.max(rel(row.measured_frequency / base, want));
        worst_g = worst_g.max(rel(row.measured_frequency, row.g));
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.measured_frequency / base).collect();
    Ok((
        worst_ratio.max(worst_g) <= SCALING_TOL,
        format!("ratios {ratios:.9?}, ratio error {worst_ratio:.2e}, vs g {worst_g:.2e}"),
    ))
}

fn pair_matrix(p: &QubitParams, n1: u32, n2: u32) -> Result<(FockSpace, SparseMatrix), String> {
    let space = isolated_pair_space(p, n1, n2).map_err(err)?;
    let h = build_fock_matrix(&p.hamiltonian(), &space).map_err(err)?;
    Ok((space, h))
}

fn two_level_rotation() -> Verdict {
    // E1 = E2 and lambda12 = 2 lambda: |2,3> and |3,2> are degenerate
    let kappa = Complex64::from_polar(0.01, 0.3);
    let p = QubitParams::effective([0.2, 0.2], [0.05, 0.05], 0.1, kappa, 1e-4);
    let (n1, n2) = (2, 3);
    let model = two_level(&p, n1, n2).map_err(err)?;
    let (space, h) = pair_matrix(&p, n1, n2)?;
    let (a, b) = (space.index_of(&[n1, n2]).unwrap(), space.index_of(&[n1 + 1, n2 - 1]).unwrap());
    let times: Vec<f64> = (0..=64).map(|i| 2.0 * PI / model.g * i as f64 / 64.0).collect();
    let traj = propagate(&h, &basis_state(&space, &[n1, n2]).map_err(err)?, &times).map_err(err)?;
    let phase = model.coupling / model.g;
    let mut worst: f64 = 0.0;
    for (step, &t) in times.iter().enumerate() {
        let undo = Complex64::from_polar(1.0, model.e_initial * t);
        let alpha = traj.amplitudes[step][a] * undo;
        let beta = traj.amplitudes[step][b] * undo;
        let (s, c) = (model.g * t).sin_cos();
        let want_beta = Complex64::new(0.0, -s) * phase;
        worst = worst.max((alpha - c).norm()).max((beta - want_beta).norm());
    }

    let mut worst_transfer: f64 = 0.0;
    let mut detuned = Vec::new();
    for offset in [0.002, 0.01, 0.03, 0.1] {
        let q = QubitParams::effective([0.2, 0.2 + offset], [0.05, 0.05], 0.1, kappa, 1e-4);
        let m = two_level(&q, n1, n2).map_err(err)?;
        let (space, h) = pair_matrix(&q, n1, n2)?;
        let target = space.index_of(&[n1 + 1, n2 - 1]).unwrap();
        let t_peak = PI / (2.0 * m.rabi_frequency());
        let grid: Vec<f64> = (0..=400).map(|i| 2.0 * t_peak * i as f64 / 400.0).collect();
        let traj = propagate(&h, &basis_state(&space, &[n1, n2]).map_err(err)?, &grid).map_err(err)?;
        let peak = (0..grid.len()).map(|s| traj.population(s, target)).fold(0.0, f64::max);
        let want = m.g * m.g / (m.g * m.g + 0.25 * m.delta * m.delta);
        worst_transfer = worst_transfer.max((peak - want).abs());
        detuned.push(format!("{:.3}", peak));
    }
    Ok((
        worst <= AMPLITUDE_TOL && worst_transfer <= TRANSFER_TOL,
        format!(
            "resonant amplitude error {worst:.2e}; detuned max transfer error {worst_transfer:.2e} (peaks {})",
            detuned.join(", ")
        ),
    ))
}

fn leakage_protection() -> Verdict {
    // fixture: configs/evolve-qubit.toml, pair |3,3> -> |4,2>
    let protected = preset("evolve-qubit");
    let n_t = 6u32;
    let g = two_level(&protected, 3, 3).map_err(err)?.g;
    let margin = protected.lambda1 * n_t as f64 / g;
    let on = shell_leakage(&protected, 3, 3, 2000).map_err(err)?;
    let mut flat = protected.clone();
    flat.lambda1 = 0.0;
    flat.lambda2 = 0.0;
    flat.lambda12 = 0.0;
    flat.e2 = flat.e1;
    let off = shell_leakage(&flat, 3, 3, 2000).map_err(err)?;
    Ok((
        margin >= 10.0 && on.max_leakage < PROTECTED_LEAKAGE_MAX && off.max_leakage > UNPROTECTED_LEAKAGE_MIN,
        format!(
            "lambda n_t / g = {margin:.1}; max leakage {:.3e} with lambda, {:.3} with lambda = 0",
            on.max_leakage, off.max_leakage
        ),
    ))
}

fn synchronism_solver() -> Verdict {
    let films = [
        (1.0, 1, 0.1, -0.2, 0.05, 0.0),
        (1.0, 2, 0.05, -0.3, -0.1, 0.02),
        (0.7, 1, -0.2, -0.9, 0.3, -0.05),
        (2.0, 2, 0.4, -0.3, 0.1, 0.1),
    ];
    let mut worst: f64 = 0.0;
    for (exchange, dimension, dipole_transverse, dzz0, j12, dzz12) in films {
        let model = SynchronismModel::Film { exchange, dimension, dipole_transverse, dzz0, j12, dzz12 };
        let want = model.closed_form_k0().ok_or("film parameters have no root")?;
        let sol = solve_synchronism(&model, SynchronismUnknown::K0 { lo: 0.0, hi: PI }, 0.0).map_err(err)?;
        if sol.roots.len() != 1 {
            return Ok((false, format!("expected one root in [0, pi], got {:?}", sol.roots)));
        }
        worst = worst.max((sol.roots[0] - want).abs());
    }

    // the sweep pipeline on the film preset, against the closed form
    let s = load_scenario(&configs().join("sweep-k0.toml")).map_err(err)?;
    let out = experiments::run(Experiment::Sweep, &s).map_err(err)?;
    let model = scenario::synchronism_model(&s).map_err(err)?.ok_or("sweep preset has no film model")?;
    let want = model.closed_form_k0().ok_or("sweep preset has no root")?;
    let roots: Vec<f64> = serde_json::from_value(out.results["sign_change_roots"].clone()).map_err(err)?;
    let sweep = roots.iter().map(|r| (r - want).abs()).fold(f64::INFINITY, f64::min);
    Ok((
        worst <= CLOSED_FORM_TOL && roots.len() == 1 && sweep <= SWEEP_TOL,
        format!("solver vs arccos {worst:.2e}; sweep sign change vs arccos {sweep:.2e}"),
    ))
}

struct Built {
    label: String,
    space: FockSpace,
    h: SparseMatrix,
}

fn build(label: &str, p: &QubitParams, space: FockSpace) -> Result<Built, String> {
    let h = build_fock_matrix(&p.hamiltonian(), &space).map_err(err)?;
    Ok(Built { label: label.into(), space, h })
}

fn conservation() -> Verdict {
    let effective = preset("evolve-qubit");
    let basic = preset("basic-box");
    let well = preset("double-well");
    let mut built = vec![
        build("effective shell", &effective, shell_space(&effective, 6).map_err(err)?)?,
        build("effective caps", &effective, make_fock_space(effective.modes(), vec![8, 8], None).map_err(err)?)?,
        build("basic shell", &basic, shell_space(&basic, 10).map_err(err)?)?,
        build("basic pair", &basic, isolated_pair_space(&basic, 5, 5).map_err(err)?)?,
        build("double-well shell", &well, shell_space(&well, 8).map_err(err)?)?,
        build("double-well large shell", &well, shell_space(&well, 25).map_err(err)?)?,
    ];
    let s = load_scenario(&configs().join("basic-box.toml")).map_err(err)?;
    let lat = scenario::lattice(&s).map_err(err)?;
    let table = scenario::couplings(&s, &lat).map_err(err)?;
    let grid = [lat.k_grid(0).map_err(err)?, lat.k_grid(1).map_err(err)?];
    let fourier = FourierTable::full(&table, &lat).map_err(err)?;
    let k = kspace_coefficients(&fourier, &lat, [&grid[0], &grid[1]]).map_err(err)?;
    let space = make_fock_space(k.mode_list(), vec![2; 2 * grid[0].len()], Some(2)).map_err(err)?;
    built.push(Built { label: "plane-wave shell".into(), h: build_fock_matrix(&k.terms(), &space).map_err(err)?, space });

    let (mut herm, mut comm): (f64, f64) = (0.0, 0.0);
    let (mut norm, mut energy): (f64, f64) = (0.0, 0.0);
    let mut krylov = false;
    for b in &built {
        herm = herm.max(b.h.hermiticity_residual());
        comm = comm.max(b.h.commutator_with_diagonal(&b.space.total_number()));
        let start = b.space.state(b.space.dim() / 2).to_vec();
        let psi = basis_state(&b.space, &start).map_err(err)?;
        let mut mixed = psi.clone();
        mixed[0] += Complex64::new(0.0, 1.0);
        let horizon = 50.0;
        let times: Vec<f64> = (0..=40).map(|i| horizon * i as f64 / 40.0).collect();
        for init in [psi, mixed.unscale(mixed.norm())] {
            let traj = propagate(&b.h, &CVector::from(init), &times).map_err(|e| format!("{}: {e}", b.label))?;
            norm = norm.max(traj.max_norm_drift());
            energy = energy.max(traj.energy_drift());
        }
        krylov |= b.h.dim() > magqubit::DENSE_PROPAGATION_LIMIT;
    }
    Ok((
        herm <= MATRIX_TOL && comm <= MATRIX_TOL && norm <= DRIFT_TOL && energy <= DRIFT_TOL && krylov,
        format!(
            "{} Hamiltonians: hermiticity {herm:.2e}, [H, N] {comm:.2e}; trajectories: norm {norm:.2e}, energy {energy:.2e}",
            built.len()
        ),
    ))
}

struct PairSpectrum {
    diagonal: [f64; 2],
    dressed: [f64; 2],
    rabi: f64,
}

fn pair_spectrum(p: &QubitParams, space: &FockSpace, from: &[u32], to: &[u32]) -> Result<PairSpectrum, String> {
    let h = build_fock_matrix(&p.hamiltonian(), space).map_err(err)?;
    let (a, b) = (space.index_of(from).unwrap(), space.index_of(to).unwrap());
    let spectral = Spectral::new(&h).map_err(err)?;
    let ca = spectral.coefficients(&basis_state(space, from).map_err(err)?);
    let cb = spectral.coefficients(&basis_state(space, to).map_err(err)?);
    let mut order: Vec<usize> = (0..space.dim()).collect();
    let weight = |j: usize| ca[j].norm_sqr() + cb[j].norm_sqr();
    order.sort_by(|&x, &y| weight(y).total_cmp(&weight(x)));
    let mut dressed = [spectral.values()[order[0]], spectral.values()[order[1]]];
    dressed.sort_by(f64::total_cmp);
    let g = two_level(p, from[0], from[1]).map_err(err)?.rabi_frequency();
    let rabi = measure_rabi_frequency(&h, a, b, 1.5 * PI / g, 3001).map_err(err)?;
    Ok(PairSpectrum { diagonal: [h.get(a, a).re, h.get(b, b).re], dressed, rabi })
}

fn truncation() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (name, n1, n2) in [("evolve-qubit", 3u32, 3u32), ("basic-box", 5, 5)] {
        let p = preset(name);
        let n_t = n1 + n2;
        let (from, to) = ([n1, n2], [n1 + 1, n2 - 1]);
        for shell in [Some(n_t), None] {
            let small = make_fock_space(p.modes(), vec![n_t; 2], shell).map_err(err)?;
            let large = make_fock_space(p.modes(), vec![2 * n_t; 2], shell).map_err(err)?;
            let x = pair_spectrum(&p, &small, &from, &to)?;
            let y = pair_spectrum(&p, &large, &from, &to)?;
            for (u, v) in x.diagonal.iter().chain(&x.dressed).zip(y.diagonal.iter().chain(&y.dressed)) {
                worst = worst.max((u - v).abs() / v.abs().max(1.0));
            }
            worst = worst.max(rel(x.rabi, y.rabi));
            cases += 1;
        }
    }
    Ok((
        worst <= TRUNCATION_TOL,
        format!("{cases} cap doublings, max relative change in pair energies and Rabi frequency {worst:.2e}"),
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("HP vs exact one-magnon dispersion", hp_dispersion),
        ("real-space vs plane-wave Fock matrices", realspace_kspace),
        ("perfect-square identity", perfect_square),
        ("anharmonic qubit spectrum", anharmonic_spectrum),
        ("sqrt(n) Rabi enhancement", sqrt_n_enhancement),
        ("two-level rotation", two_level_rotation),
        ("leakage under anharmonic protection", leakage_protection),
        ("synchronism solver", synchronism_solver),
        ("conservation and hermiticity", conservation),
        ("truncation convergence", truncation),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        println!("{} criterion {:>2} {name}: {detail}", if passed { "PASS" } else { "FAIL" }, i + 1);
        if !passed {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
