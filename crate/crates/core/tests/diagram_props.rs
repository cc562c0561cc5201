mod common;

use common::*;
use gct::diagram::{Diagram, NodeId, Phase};
use gct::models::fixtures::{bool_b, qubit};
use gct::signatures::{boolcirc, qucirc};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn close(a: &gct::models::Matrix<gct::C64>, b: &gct::models::Matrix<gct::C64>, tol: f64) -> bool {
    a.shape() == b.shape() && a.max_abs_diff(b) <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn interchange_law(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g) = (random_circuit(&mut r, 1, 3), random_circuit(&mut r, 2, 3));
        let (h, k) = (random_circuit(&mut r, 1, 3), random_circuit(&mut r, 2, 3));
        let left = f.tensor(&g).compose(&h.tensor(&k)).unwrap();
        let right = f.compose(&h).unwrap().tensor(&g.compose(&k).unwrap());
        prop_assert!(left.iso_equal(&right));
        let m = qubit();
        prop_assert!(close(&m.interpret(&left).unwrap(), &m.interpret(&right).unwrap(), 1e-12));
    }

    #[test]
    fn dagger_is_involutive_and_contravariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_circuit(&mut r, 2, 4);
        let g = random_circuit(&mut r, 2, 4);
        prop_assert!(f.dagger().unwrap().dagger().unwrap().iso_equal(&f));
        let lhs = f.compose(&g).unwrap().dagger().unwrap();
        let rhs = g.dagger().unwrap().compose(&f.dagger().unwrap()).unwrap();
        prop_assert!(lhs.iso_equal(&rhs));
        let m = qubit();
        prop_assert!(close(&m.interpret(&f.dagger().unwrap()).unwrap(), &m.interpret(&f).unwrap().dagger(), 1e-12));
    }

    #[test]
    fn functoriality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = qubit();
        let f = random_circuit(&mut r, 2, 3);
        let g = random_circuit(&mut r, 2, 3);
        let h = random_spider_network(&mut r, 1, 3);
        let (vf, vg, vh) = (m.interpret(&f).unwrap(), m.interpret(&g).unwrap(), m.interpret(&h).unwrap());
        prop_assert!(close(&m.interpret(&f.compose(&g).unwrap()).unwrap(), &vg.compose(&vf), 1e-12));
        prop_assert!(close(&m.interpret(&f.tensor(&h)).unwrap(), &vf.kron(&vh), 1e-12));
    }

    #[test]
    fn partition_independence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_spider_network(&mut r, 2, 6);
        let m = qubit();
        let a = m.interpret_shuffled(&d, &mut r).unwrap();
        let b = m.interpret_shuffled(&d, &mut r).unwrap();
        prop_assert!(close(&a, &b, 1e-12));
    }

    #[test]
    fn yank_preserves_evaluation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_circuit(&mut r, 1, 3);
        // Bend the output down and back up: a zig-zag around f.
        let sys = q();
        let zig = Diagram::identity(std::slice::from_ref(&sys)).tensor(&Diagram::cup(&sys).unwrap())
            .compose(&Diagram::cap(&sys).unwrap().tensor(&Diagram::identity(std::slice::from_ref(&sys)))).unwrap();
        let d = f.compose(&zig).unwrap();
        let y = d.yank_normalize();
        prop_assert!(y.node_count() < d.node_count());
        let m = qubit();
        prop_assert!(close(&m.interpret(&d).unwrap(), &m.interpret(&y).unwrap(), 1e-9));
        prop_assert!(y.iso_equal(&f));
    }

    #[test]
    fn scalar_mobility(seed in any::<u64>(), side in any::<bool>()) {
        let mut r = rng(seed);
        let f = random_circuit(&mut r, 2, 4);
        let s = random_spider_network(&mut r, 0, 3);
        let s = if s.outputs().is_empty() { s } else { s.compose(&Diagram::spider("white", &q(), s.outputs().len(), 0, Phase::Zero)).unwrap() };
        let a = if side { s.tensor(&f) } else { f.tensor(&s) };
        let b = f.compose(&Diagram::identity(f.outputs()).tensor(&s)).unwrap();
        prop_assert!(a.iso_equal(&b));
        let m = qubit();
        prop_assert!(close(&m.interpret(&a).unwrap(), &m.interpret(&b).unwrap(), 1e-9));
    }

    #[test]
    fn relabelling_keeps_iso_class(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_spider_network(&mut r, 2, 5);
        let ids: Vec<NodeId> = d.nodes().keys().copied().collect();
        let mut shuffled = ids.clone();
        use rand::seq::SliceRandom;
        shuffled.shuffle(&mut r);
        let map: BTreeMap<NodeId, NodeId> = ids.into_iter().zip(shuffled.into_iter().map(|n| NodeId(n.0 + 100))).collect();
        prop_assert!(d.renumbered(&map).iso_equal(&d));
    }
}

#[test]
fn boolean_yank_is_exact() {
    let sig = boolcirc();
    let circ = gct::rewrite::example_circuit(&sig);
    let m = bool_b();
    assert_eq!(m.interpret(&circ.yank_normalize()).unwrap(), m.interpret(&circ).unwrap());
}

#[test]
fn trace_is_cyclic() {
    let mut r = rng(7);
    let m = qubit();
    for _ in 0..20 {
        let f = random_circuit(&mut r, 2, 4);
        let g = random_circuit(&mut r, 2, 4);
        let a = m.interpret(&f.compose(&g).unwrap().trace().unwrap()).unwrap();
        let b = m.interpret(&g.compose(&f).unwrap().trace().unwrap()).unwrap();
        assert!(close(&a, &b, 1e-9));
    }
}

#[test]
fn teleportation_is_identity() {
    let sig = qucirc();
    let sys = sig.ty("Q").unwrap();
    let id = Diagram::identity(std::slice::from_ref(&sys));
    let d = id.tensor(&Diagram::cup(&sys).unwrap()).compose(&Diagram::cap(&sys).unwrap().tensor(&id)).unwrap();
    let m = qubit();
    assert!(close(&m.interpret(&d).unwrap(), &gct::models::Matrix::identity(2), 1e-12));
    assert!(d.iso_equal(&id));
}
