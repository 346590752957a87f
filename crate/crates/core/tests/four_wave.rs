use nlsprop::hamiltonian::{ExternalPotential, LinearHamiltonian, MixingTerm, NonlinearPotential};
use nlsprop::profiles::smooth_random_state;
use nlsprop::schemes;
use nlsprop::{Complex64, Grid64, Method, Propagator64};

fn setup(g: f64) -> (Grid64, Propagator64) {
    let grid = Grid64::new(&[64], &[10.0]).unwrap();
    let h0 = LinearHamiltonian::uniform(&grid, 1.0, ExternalPotential::harmonic(&grid, 0.5), 4).unwrap();
    let pm = [[1.0, 0.5, 0.5, 0.5], [0.5, 1.0, 0.5, 0.5], [0.5, 0.5, 1.0, 0.5], [0.5, 0.5, 0.5, 1.0]];
    let prop = Propagator64::new(h0, NonlinearPotential::four_wave(g, pm)).unwrap();
    (grid, prop)
}

#[test]
fn zero_coupling_matches_strang_on_diagonal_part() {
    let grid = Grid64::new(&[64], &[10.0]).unwrap();
    let h0 = LinearHamiltonian::uniform(&grid, 1.0, ExternalPotential::harmonic(&grid, 0.5), 4).unwrap();
    let pm = [[0.3; 4]; 4];
    let mut fwm = Propagator64::new(h0.clone(), NonlinearPotential::four_wave(0.0, pm)).unwrap();
    let coupled: Vec<Vec<f64>> = pm.iter().map(|r| r.to_vec()).collect();
    let mut plain = Propagator64::new(h0, NonlinearPotential::coupled(&coupled).unwrap()).unwrap();
    let psi = smooth_random_state(&grid, 4, 8);
    let a = fwm.evolve(&psi, &Method::FourWave { order: 2 }, 0.01, 5).unwrap();
    let b = plain.evolve(&psi, &Method::Split(schemes::strang()), 0.01, 5).unwrap();
    assert!(a.max_difference(&b) < 1e-13);
}

#[test]
fn rotation_with_vanishing_source_is_identity() {
    let (grid, mut prop) = setup(1.0);
    let mut psi = smooth_random_state(&grid, 4, 2);
    psi.component_mut(1).iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
    let mut out = psi.clone();
    prop.apply_mixing_rotation(&mut out, 0.7, MixingTerm::V1);
    assert_eq!(out.data(), psi.data());
}

#[test]
fn norm_is_conserved_for_every_order() {
    let (grid, mut prop) = setup(1.2);
    let psi = smooth_random_state(&grid, 4, 5);
    for order in [2, 4, 6] {
        let out = prop.evolve(&psi, &Method::FourWave { order }, 0.01, 200).unwrap();
        assert!((out.norm() - psi.norm()).abs() < 1e-12, "order {order}");
    }
}

#[test]
fn scheme_names_map_to_four_wave_orders() {
    let (_, prop) = setup(1.0);
    for (name, order) in [("strang", 2), ("forest-ruth", 4), ("order6", 6)] {
        let m = Method::by_name(name, prop.potential(), Default::default()).unwrap();
        assert_eq!(m, Method::FourWave { order });
    }
    assert!(Method::by_name("order8", prop.potential(), Default::default()).is_err());
}
