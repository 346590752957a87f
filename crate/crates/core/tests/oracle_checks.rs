use nlsprop::convergence::loglog_slope;
use nlsprop::hamiltonian::{ExternalPotential, LinearHamiltonian, NonlinearPotential};
use nlsprop::oracle::commutator::nodeless_state;
use nlsprop::oracle::suite::all_passed;
use nlsprop::oracle::{dense_h0, fd_double_commutator, run_suite, SuiteConfig};
use nlsprop::profiles::smooth_random_state;
use nlsprop::schemes;
use nlsprop::{CommutatorVariant, Complex64, Grid64, Method, Propagator64, WaveFunction64};

#[test]
fn suite_subset_passes() {
    let cfg = SuiteConfig {
        only: Some(vec!["appeq".into(), "power".into(), "linearity".into()]),
        ..SuiteConfig::default()
    };
    let rows = run_suite(&cfg).unwrap();
    assert!(rows.len() > 10);
    assert!(all_passed(&rows), "{}", nlsprop::oracle::suite::format_table(&rows));
}

#[test]
fn tight_tolerance_exposes_fd_floor() {
    let cfg = SuiteConfig {
        tol: 1e-12,
        only: Some(vec!["appeq12".into()]),
        ..SuiteConfig::default()
    };
    let rows = run_suite(&cfg).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(!all_passed(&rows));
}

#[test]
fn oracle_picks_canonical_field() {
    let grid = Grid64::new(&[32], &[10.0]).unwrap();
    let vals = (0..grid.len())
        .map(|p| 0.5 * (2.0 * std::f64::consts::PI * grid.position(p)[0] / 10.0).cos())
        .collect();
    let h0 = LinearHamiltonian::uniform(&grid, 1.0, ExternalPotential::from_values(&grid, vals).unwrap(), 1).unwrap();
    let r = fd_double_commutator(&nodeless_state(&grid, 21), &h0, 1.0).unwrap();
    assert_eq!(r.matching_variant(), Some(CommutatorVariant::Canonical), "{}", r.summary());
    assert!(r.paper_error > 0.1);
}

#[test]
fn linear_limit_matches_dense_exponential_at_scheme_order() {
    let grid = Grid64::new(&[32], &[10.0]).unwrap();
    let ext = ExternalPotential::harmonic(&grid, 0.8);
    let dense = dense_h0(&grid, ext.values(), 1.0).unwrap();
    let h0 = LinearHamiltonian::uniform(&grid, 1.0, ext, 1).unwrap();
    let psi = smooth_random_state(&grid, 1, 4);
    let t = 0.5;
    let exact = dense.exp_apply(Complex64::new(t, 0.0), psi.data()).unwrap();
    let exact = WaveFunction64::from_data(&grid, 1, exact).unwrap();
    let mut prop = Propagator64::new(h0, NonlinearPotential::cubic(0.0)).unwrap();
    for (name, order) in [("strang", 2.0), ("forest-ruth", 4.0)] {
        let method = Method::Split(schemes::splitting_by_name(name).unwrap());
        let dts = [0.05, 0.025, 0.0125];
        let errs: Vec<f64> = dts
            .iter()
            .map(|dt| {
                let n = (t / dt).round() as usize;
                prop.evolve(&psi, &method, *dt, n).unwrap().distance(&exact)
            })
            .collect();
        let slope = loglog_slope(&dts, &errs).unwrap();
        assert!((slope - order).abs() < 0.25, "{name}: slope {slope}, errors {errs:?}");
    }
}
