use magqubit_cli::config::parse_scenario;
use magqubit_cli::output::{read_summary, Outcome, Summary};
use proptest::prelude::*;

fn scenario_text(field: f64, start: f64, stop: f64, points: usize) -> String {
    format!(
        "name = \"p\"\n[lattice]\nshape = \"ring\"\nsize = [4]\nspins = [0.5, 1.0]\nfields = [0.0, {field:?}]\n\
         [sweep]\nvariable = \"lattice.fields.2\"\nstart = {start:?}\nstop = {stop:?}\npoints = {points}\n"
    )
}

proptest! {
    #[test]
    fn sweep_grid_hits_both_endpoints(start in -5.0..5.0f64, span in 0.1..5.0f64, points in 2usize..60) {
        let s = parse_scenario(&scenario_text(0.1, start, start + span, points)).unwrap();
        let v = s.sweep.unwrap().values().unwrap();
        prop_assert_eq!(v.len(), points);
        prop_assert_eq!(v[0], start);
        prop_assert_eq!(*v.last().unwrap(), start + span);
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn summary_round_trips_exactly(field in -1.0..1.0f64, x in proptest::num::f64::NORMAL) {
        let scenario = parse_scenario(&scenario_text(field, 0.0, 1.0, 3)).unwrap();
        let mut outcome = Outcome::default();
        outcome.headline("value", x);
        let summary = Summary::new(&scenario, "sweep", &outcome, true);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.json");
        std::fs::write(&path, summary.to_json()).unwrap();
        let back = read_summary(&path).unwrap();
        prop_assert_eq!(back.config.lattice.fields, [0.0, field]);
        prop_assert_eq!(back.results["headline"]["value"].as_f64().unwrap(), x);
        prop_assert_eq!(back.to_json(), summary.to_json());
    }
}
