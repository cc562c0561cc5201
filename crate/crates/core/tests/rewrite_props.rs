mod common;

use common::*;
use gct::diagram::{Diagram, NodeId};
use gct::models::fixtures::{bool_b, cyclic_bialgebra, qubit};
use gct::models::{compare, EqualityMode, Matrix};
use gct::rewrite::*;
use gct::signatures::boolcirc;
use gct::C64;
use proptest::prelude::*;
use rand::Rng;
use std::collections::BTreeMap;

fn same(a: &Matrix<C64>, b: &Matrix<C64>) -> bool {
    a.shape() == b.shape() && a.max_abs_diff(b) < 1e-9
}

fn chi_mod(c: &CharacteristicMatrix, p: u64) -> Vec<u64> {
    c.data.iter().map(|x| x % p).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn fusion_preserves_evaluation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_spider_network(&mut r, 2, 6);
        let fused = spider_fuse(&d).unwrap();
        prop_assert!(fused.node_count() <= d.node_count());
        let m = qubit();
        prop_assert!(same(&m.interpret(&fused).unwrap(), &m.interpret(&d).unwrap()));
    }

    #[test]
    fn bialgebra_rewriting_preserves_evaluation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (r.gen_range(1..=2), r.gen_range(1..=2));
        let d = random_fragment(&mut r, a, b, 6);
        let frag = Fragment::default();
        let (rewritten, _) = bialg_normalize_by_rewriting(&d, &frag, DEFAULT_BUDGET).unwrap();
        let nf = bialg_normal_form(&d, &frag).unwrap();
        prop_assert!(rewritten.iso_equal(&nf));
        // Normal forms carry one wire per path, so wide ones are only evaluated over Z_2.
        let paths: u64 = characteristic_matrix(&d, &frag).unwrap().data.iter().sum();
        prop_assume!(paths <= 16);
        let m = cyclic_bialgebra(if paths <= 10 { 3 } else { 2 });
        let v = m.interpret(&d).unwrap();
        prop_assert!(same(&m.interpret(&rewritten).unwrap(), &v));
        prop_assert!(same(&m.interpret(&nf).unwrap(), &v));
    }

    #[test]
    fn normal_form_ignores_node_names(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_fragment(&mut r, 2, 2, 6);
        let ids: Vec<NodeId> = d.nodes().keys().copied().collect();
        let map: BTreeMap<NodeId, NodeId> = ids.iter().rev().enumerate().map(|(k, id)| (*id, NodeId(500 + k as u32))).collect();
        let frag = Fragment::default();
        let e = d.renumbered(&map);
        prop_assert_eq!(characteristic_matrix(&d, &frag).unwrap(), characteristic_matrix(&e, &frag).unwrap());
        prop_assert_eq!(bialg_normal_form(&d, &frag).unwrap(), bialg_normal_form(&e, &frag).unwrap());
    }

    #[test]
    fn hopf_preserves_evaluation_up_to_scalar(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_fragment(&mut r, 2, 2, 8);
        let m = cyclic_bialgebra(2);
        if let Some(h) = hopf_once(&d, "white", "gray", 2) {
            let c = compare(&m.interpret(&h).unwrap(), &m.interpret(&d).unwrap(), EqualityMode::UpToScalar(1e-9));
            prop_assert!(c.equal);
        }
    }
}

#[test]
fn characteristic_matrix_decides_equality() {
    // Over Z_p the fragment computes y -> χy, so evaluations agree exactly when the
    // matrices agree mod p; the normal form tracks the integer matrix.
    let mut r = rng(99);
    let frag = Fragment::default();
    let models: Vec<(u64, _)> = [2u64, 3].into_iter().map(|p| (p, cyclic_bialgebra(p as usize))).collect();
    let ds: Vec<Diagram> = (0..20).map(|_| random_fragment(&mut r, 2, 2, 7)).collect();
    for a in &ds {
        for b in &ds {
            let (ca, cb) = (characteristic_matrix(a, &frag).unwrap(), characteristic_matrix(b, &frag).unwrap());
            let nf_equal = bialg_normal_form(a, &frag).unwrap().iso_equal(&bialg_normal_form(b, &frag).unwrap());
            assert_eq!(ca == cb, nf_equal);
            for (p, m) in &models {
                let ev = same(&m.interpret(a).unwrap(), &m.interpret(b).unwrap());
                assert_eq!(ev, chi_mod(&ca, *p) == chi_mod(&cb, *p), "p={p} {ca} {cb}");
            }
        }
    }
}

#[test]
fn derived_equalities_evaluate_equal() {
    let sig = boolcirc();
    let rules = boolcirc_rules(&sig);
    let [a, b, c] = dnf_sequence(&sig);
    let m = bool_b();
    for (x, y) in [(&a, &b), (&b, &c), (&a, &c)] {
        assert!(derive_equal(x, y, &rules, 200).is_some());
        assert_eq!(m.interpret(x).unwrap(), m.interpret(y).unwrap());
    }
    let run = rewrite_to_fixpoint(&rules, &example_circuit(&sig), 50).unwrap();
    assert_eq!(m.interpret(&run.result).unwrap(), m.interpret(&example_circuit(&sig)).unwrap());
}
