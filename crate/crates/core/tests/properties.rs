use magqubit::oracle::random_translation_invariant;
use magqubit::{
    build_fock_matrix, make_fock_space, square_form, symmetric_qubit, BosonTermSum, Complex64,
    FourierTable, Mode, Op, QubitParams,
};
use proptest::prelude::*;

fn synchronized(e: [f64; 2], l1: f64, l2: f64) -> QubitParams {
    let l12 = 2.0 * (l1 * l2).sqrt();
    QubitParams::effective(e, [l1, l2], l12, Complex64::new(0.0, 0.0), 0.0)
}

fn random_term(spec: &[(bool, usize)], coeff: (f64, f64)) -> BosonTermSum {
    let modes = [Mode::Condensate(0), Mode::Condensate(1), Mode::Site(7)];
    let ops: Vec<Op> = spec
        .iter()
        .map(|&(c, m)| if c { Op::create(modes[m]) } else { Op::annihilate(modes[m]) })
        .collect();
    let mut h = BosonTermSum::new();
    h.push_with_adjoint(Complex64::new(coeff.0, coeff.1), ops);
    h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn perfect_square_reproduces_secular_energy(
        e1 in -5.0..5.0f64,
        e2 in -5.0..5.0f64,
        l1 in 1e-3..2.0f64,
        l2 in 1e-3..2.0f64,
        n1 in 0u32..=20,
        n2 in 0u32..=20,
    ) {
        prop_assume!(n1 + n2 <= 20);
        let p = synchronized([e1, e2], l1, l2);
        let sq = square_form(&p).unwrap();
        let direct = p.secular_energy(n1, n2);
        let scale = 1.0f64.max(direct.abs());
        prop_assert!((sq.energy(n1, n2) - direct).abs() <= 1e-12 * scale);
    }

    #[test]
    fn charge_form_differs_from_energy_by_shell_constant(
        e1 in -5.0..5.0f64,
        e2 in -5.0..5.0f64,
        l in 1e-3..2.0f64,
        n_t in 1u32..=20,
    ) {
        let q = symmetric_qubit(&synchronized([e1, e2], l, l)).unwrap();
        let offset = q.energy(0, n_t) - q.charge_form(0, n_t);
        for a in 0..=n_t {
            let d = q.energy(a, n_t - a) - q.charge_form(a, n_t - a) - offset;
            prop_assert!(d.abs() <= 1e-9 * (1.0 + offset.abs()));
        }
        let ground = q.ground_states(n_t);
        let best = (0..=n_t)
            .map(|a| q.charge_form(a, n_t - a))
            .fold(f64::INFINITY, f64::min);
        for (a, b) in ground {
            prop_assert!(q.charge_form(a, b) - best <= 1e-9 * (1.0 + best.abs()));
        }
    }

    #[test]
    fn normal_ordering_preserves_matrix_elements(
        spec in proptest::collection::vec((any::<bool>(), 0usize..3), 1..=4),
        re in -1.0..1.0f64,
        im in -1.0..1.0f64,
    ) {
        let creations = spec.iter().filter(|s| s.0).count();
        prop_assume!(2 * creations == spec.len());
        let h = random_term(&spec, (re, im));
        let shell = 6;
        let space = make_fock_space(
            vec![Mode::Condensate(0), Mode::Condensate(1), Mode::Site(7)],
            vec![shell; 3],
            Some(shell),
        ).unwrap();
        let a = build_fock_matrix(&h, &space).unwrap();
        let b = build_fock_matrix(&h.normal_ordered(), &space).unwrap();
        let number = space.total_number();
        let limit = (shell - 2) as f64;
        for i in 0..space.dim() {
            for j in 0..space.dim() {
                if number[i] <= limit && number[j] <= limit {
                    prop_assert!((a.get(i, j) - b.get(i, j)).norm() <= 1e-12);
                }
            }
        }
        prop_assert!(a.hermiticity_residual() <= 1e-12);
        prop_assert!(a.commutator_with_diagonal(&number) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn intra_sums_are_real_and_even(seed in 0u64..10_000) {
        let (lat, table) = random_translation_invariant(seed).unwrap();
        let f = FourierTable::full(&table, &lat).unwrap();
        for m in 0..2 {
            for k in f.grid(m).to_vec() {
                let a = f.intra(m, &k).unwrap();
                let b = f.intra(m, &k.neg()).unwrap();
                prop_assert!(a.exchange.im.abs() <= 1e-12);
                prop_assert!((a.exchange - b.exchange).norm() <= 1e-12);
                prop_assert!((a.dipole - b.dipole).iter().all(|x| x.norm() <= 1e-12));
            }
        }
    }

    #[test]
    fn cross_sums_invert_to_real_space(seed in 0u64..10_000) {
        let (lat, table) = random_translation_invariant(seed).unwrap();
        let f = FourierTable::full(&table, &lat).unwrap();
        let n = lat.n_per_sample();
        let sites = lat.sites();
        for i in lat.sample_range(0) {
            for j in lat.sample_range(1) {
                let mut sum = Complex64::new(0.0, 0.0);
                for k1 in f.grid(0) {
                    for k2 in f.grid(1) {
                        let phase = magqubit::lattice::dot(&k1.value(), &sites[i].local)
                            + magqubit::lattice::dot(&k2.value(), &sites[j].local);
                        sum += f.cross(k1, k2).unwrap().exchange * Complex64::from_polar(1.0, phase);
                    }
                }
                let back = sum / n as f64;
                prop_assert!((back.re - table.exchange(i, j)).abs() <= 1e-12);
                prop_assert!(back.im.abs() <= 1e-12);
            }
        }
    }
}
