use std::f64::consts::PI;

use proptest::prelude::*;
use qidiode_core::oracle::{build_chain_hamiltonian, cross_validate, otoc_exact, ExactChain};
use qidiode_core::otoc::LatticePropagator;
use qidiode_core::{
    build_mode_set, dispersion_1d, lattice_propagator_otoc, otoc_series, Branch, ModelParams, Side, TimeGrid,
};

#[test]
fn propagator_series_matches_exact_chain() {
    let params = ModelParams::default().with_d(0.7).with_n(24);
    let grid = TimeGrid::spanning(25.0, 150).unwrap();
    let chain = ExactChain::new(build_chain_hamiltonian(&params, 24).unwrap()).unwrap();
    for displacement in [-7i64, -2, 1, 4, 11] {
        let series = lattice_propagator_otoc(&params, displacement, &grid).unwrap();
        let probe = displacement.rem_euclid(24) as usize;
        for (&t, &c) in series.times.iter().zip(&series.c) {
            assert!((otoc_exact(&chain, 0, probe, t).unwrap() - c).abs() < 1e-10);
        }
    }
}

#[test]
fn full_mode_set_is_frequency_matched() {
    let params = ModelParams::default();
    let set = build_mode_set(&params).unwrap();
    assert_eq!(set.len(), 1000);
    for m in &set.modes {
        let right = dispersion_1d(&params, m.k_plus, Branch::Plus);
        let left = dispersion_1d(&params, m.k_minus, Branch::Minus);
        assert!((right - left).abs() < 1e-12, "m0 = {}", m.m0);
        assert_eq!(m.omega, right);
    }
}

#[test]
fn reversed_field_blocks_the_other_side() {
    let params = ModelParams::default();
    let grid = TimeGrid::spanning(10.0, 80).unwrap();
    let forward = otoc_series(&params, 0.01, &grid, None).unwrap();
    let reversed = otoc_series(&params.clone().with_d(-1.0), 0.01, &grid, None).unwrap();
    assert_eq!(forward.blocked, Side::Right);
    assert_eq!(reversed.blocked, Side::Left);
    assert_eq!(forward.c_left, reversed.c_right);
    assert_eq!(forward.c_right, reversed.c_left);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_agrees_on_random_rings(n in 4usize..40, d in -2.0f64..2.0, j2 in 0.0f64..1.5, offset in 1usize..39) {
        let probe = offset % n;
        prop_assume!(probe != 0);
        let mut params = ModelParams::default().with_d(d);
        params.j2 = j2;
        let grid = TimeGrid::spanning(20.0, 40).unwrap();
        let report = cross_validate(&params, n, &[(0, probe)], &grid).unwrap();
        prop_assert!(report.passed, "{:?}", report);
    }

    #[test]
    fn spectrum_is_the_sampled_band(n in 4usize..48, d in -2.0f64..2.0) {
        let params = ModelParams::default().with_d(d).with_n(n);
        let chain = ExactChain::new(build_chain_hamiltonian(&params, n).unwrap()).unwrap();
        let mut band: Vec<f64> = (0..n)
            .map(|m| dispersion_1d(&params, 2.0 * PI * m as f64 / (n as f64 * params.a), Branch::Plus))
            .collect();
        band.sort_by(f64::total_cmp);
        for (e, b) in chain.spectrum().eigenvalues.iter().zip(&band) {
            prop_assert!((e - b).abs() < 1e-10);
        }
    }

    #[test]
    fn probabilities_are_conserved(n in 4usize..32, d in -2.0f64..2.0, t in 0.0f64..200.0) {
        let params = ModelParams::default().with_d(d).with_n(n);
        let total: f64 = (0..n as i64)
            .map(|s| LatticePropagator::new(&params, s).unwrap().probability(t))
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}
