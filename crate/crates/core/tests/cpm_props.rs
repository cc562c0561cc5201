mod common;

use common::*;
use gct::cpm::*;
use gct::models::fixtures::{qubit, x_observable, y_observable, z_observable};
use gct::models::Matrix;
use gct::C64;
use proptest::prelude::*;

fn kraus_family(r: &mut impl rand::Rng, count: usize, d: usize) -> Vec<Matrix<C64>> {
    let ks: Vec<Matrix<C64>> = (0..count).map(|_| random_complex(r, d, d)).collect();
    let mut s = Matrix::zeros(d, d);
    for k in &ks {
        s = s.add(&k.dagger().compose(k));
    }
    // Scale so that Σ K†K ≤ 1 with a little slack.
    let top = -min_eigenvalue(&s.scale(C64::new(-1.0, 0.0)));
    let f = C64::new(0.9 / top.sqrt(), 0.0);
    ks.into_iter().map(|k| k.scale(f)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn doubling_respects_composition_and_tensor(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_complex(&mut r, 2, 2), random_complex(&mut r, 2, 2));
        let lhs = double(&b.compose(&a));
        let rhs = double(&a).then(&double(&b)).unwrap();
        prop_assert!(lhs.superop.max_abs_diff(&rhs.superop) < 1e-9);
        let (r1, r2) = (random_density(&mut r, 2), random_density(&mut r, 2));
        let joint = double(&a.kron(&b)).apply(&r1.kron(&r2)).unwrap();
        let split = double(&a).apply(&r1).unwrap().kron(&double(&b).apply(&r2).unwrap());
        prop_assert!(joint.max_abs_diff(&split) < 1e-9);
    }

    #[test]
    fn kraus_maps_send_states_to_subnormalised_states(seed in any::<u64>(), count in 1usize..4) {
        let mut r = rng(seed);
        let ks = kraus_family(&mut r, count, 2);
        let rho = random_density(&mut r, 2);
        let out = kraus_cpm(&ks).unwrap().apply(&rho).unwrap();
        prop_assert!(min_eigenvalue(&out) > -1e-9);
        prop_assert!(out.trace().re <= 1.0 + 1e-9);
        prop_assert!(out.max_abs_diff(&out.dagger()) < 1e-9);
        let packed = double_with_ancilla(&kraus_pack(&ks).unwrap(), count).unwrap();
        prop_assert!(packed.superop.max_abs_diff(&kraus_cpm(&ks).unwrap().superop) < 1e-9);
    }

    #[test]
    fn born_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, 2);
        for obs in [z_observable(), x_observable(), y_observable()] {
            let b = measure(&obs, &rho).unwrap();
            let psi = born_witness_state(&obs, &b).unwrap();
            prop_assert!(measure(&obs, &projector(&psi)).unwrap().max_diff(&b) < 1e-9);
            prop_assert!(measure(&obs, &prepare(&obs, &b).unwrap()).unwrap().max_diff(&b) < 1e-9);
        }
    }

    #[test]
    fn doubled_diagrams_match_doubled_matrices(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = random_circuit(&mut r, 2, 5);
        let m = qubit();
        let got = CpmDiagram::pure(c.clone()).evaluate(&m).unwrap();
        let want = double(&m.interpret(&c).unwrap());
        prop_assert!(got.superop.max_abs_diff(&want.superop) < 1e-9);
    }
}

#[test]
fn decoherence_is_idempotent_and_diagonal() {
    let mut r = rng(5);
    for obs in [z_observable(), x_observable()] {
        let dec = decoherence(&obs).unwrap();
        let twice = dec.then(&dec).unwrap();
        assert!(twice.superop.max_abs_diff(&dec.superop) < 1e-12);
        let rho = random_density(&mut r, 2);
        let out = dec.apply(&rho).unwrap();
        let b = measure(&obs, &rho).unwrap();
        assert!(out.max_abs_diff(&prepare(&obs, &b).unwrap()) < 1e-12);
    }
}
