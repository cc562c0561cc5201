mod common;

use common::*;
use gct::diagram::Diagram;
use gct::models::fixtures::{bool_b, bool_p, cnot, qubit, symgrp, x_rotation, z_rotation};
use gct::models::{check_soundness, AnyModel, Matrix};
use gct::rewrite::boolcirc_rules;
use gct::signatures::{boolcirc, sym_grp};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gates_are_unitary(a in -10.0f64..10.0) {
        for u in [z_rotation(a), x_rotation(a)] {
            prop_assert!(u.dagger().compose(&u).max_abs_diff(&Matrix::identity(2)) < 1e-12);
            prop_assert!(u.compose(&u.dagger()).max_abs_diff(&Matrix::identity(2)) < 1e-12);
        }
    }

    #[test]
    fn circuits_are_unitary(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = qubit().interpret(&random_circuit(&mut r, 3, 8)).unwrap();
        prop_assert!(u.dagger().compose(&u).max_abs_diff(&Matrix::identity(8)) < 1e-12);
    }
}

#[test]
fn cnot_is_unitary() {
    let u = cnot();
    assert_eq!(u.dagger().compose(&u), Matrix::identity(4));
}

#[test]
fn relational_unitaries_are_permutations() {
    // Every relation on a set of size 3 whose converse is its inverse is a bijection.
    let n = 3;
    for bits in 0u32..(1 << (n * n)) {
        let r = Matrix::from_fn(n, n, |i, j| bits >> (i * n + j) & 1 == 1);
        let unitary = r.dagger().compose(&r) == Matrix::identity(n) && r.compose(&r.dagger()) == Matrix::identity(n);
        let permutation = (0..n).all(|i| (0..n).filter(|&j| r.get(i, j)).count() == 1) && (0..n).all(|j| (0..n).filter(|&i| r.get(i, j)).count() == 1);
        assert_eq!(unitary, permutation, "relation {bits:b}");
    }
}

#[test]
fn boolean_inner_product_detects_overlap() {
    for a in 0u32..8 {
        for b in 0u32..8 {
            let sa = Matrix::from_fn(3, 1, |i, _| a >> i & 1 == 1);
            let sb = Matrix::from_fn(3, 1, |i, _| b >> i & 1 == 1);
            let inner = sa.dagger().compose(&sb).get(0, 0);
            assert_eq!(inner, a & b != 0);
        }
    }
}

#[test]
fn symmetric_group_embeds_as_permutation_matrices() {
    let sig = sym_grp();
    let u = sig.ty("u").unwrap();
    let m = symgrp(2);
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for p in perms {
        let d = Diagram::permutation(&[u.clone(), u.clone(), u.clone()], &p).unwrap();
        let v = m.interpret(&d).unwrap();
        let want = Matrix::wire_permutation(&[2, 2, 2], &p);
        assert_eq!(v, want, "{p:?}");
        for col in 0..8 {
            assert_eq!((0..8).filter(|&row| v.get(row, col).norm() > 0.5).count(), 1);
        }
    }
}

#[test]
fn boolean_soundness() {
    let sig = boolcirc();
    let rules = boolcirc_rules(&sig);
    let mut r = rng(1);
    let b = check_soundness(&rules, &AnyModel::Boolean(bool_b()), 0, 0.0, &mut r).unwrap();
    assert!(b.all_sound());
    let p = check_soundness(&rules, &AnyModel::Boolean(bool_p()), 0, 0.0, &mut r).unwrap();
    let dist = p.verdicts.iter().find(|v| v.rule == "distributivity").unwrap();
    let dm = p.verdicts.iter().find(|v| v.rule == "de-morgan").unwrap();
    assert!(dist.sound);
    assert!(!dm.sound);
    assert!(dm.witness.is_some());
}
