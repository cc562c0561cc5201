mod common;

use common::*;
use gct::algebra::{zx_pair, AbelianGroup};
use gct::diagram::Phase;
use gct::nonlocality::*;
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, PI};

#[test]
fn diagrammatic_correlations_match_born_rule() {
    let mut r = rng(2024);
    let pair = zx_pair();
    for _ in 0..50 {
        let angles: Vec<Phase> = (0..3).map(|_| Phase::angle(random_angle(&mut r))).collect();
        let got = ghz_correlations(&pair, &angles).unwrap();
        let want = ghz_born_oracle(&pair, &angles).unwrap();
        assert!(got.max_diff(&want) < 1e-9, "{angles:?}: {got} vs {want}");
    }
}

#[test]
fn quarter_turn_dichotomy() {
    let pair = zx_pair();
    let z2 = AbelianGroup::new(&[2]);
    for bits in 0..8u32 {
        let raw: Vec<f64> = (0..3).map(|k| if bits >> k & 1 == 1 { FRAC_PI_2 } else { 0.0 }).collect();
        let angles: Vec<Phase> = raw.iter().map(|&a| Phase::angle(a)).collect();
        let b = ghz_correlations(&pair, &angles).unwrap();
        let total = raw.iter().sum::<f64>().rem_euclid(2.0 * PI);
        let par = parity(&b, &z2, 3);
        if total < 1e-9 || (total - PI).abs() < 1e-9 {
            // Parity is fixed: even for a zero sum, odd for π.
            let want = if total < 1e-9 { 0 } else { 1 };
            assert!((par[want] - 1.0).abs() < 1e-9, "{raw:?}: {par:?}");
        } else {
            for p in &b.probs {
                assert!((p - 0.125).abs() < 1e-9, "{raw:?}: {b}");
            }
        }
    }
}

#[test]
fn lhv_search_ignores_constraint_order() {
    let mut r = rng(3);
    for _ in 0..20 {
        let mut cs: Vec<ParityConstraint> = (0..4)
            .map(|_| ParityConstraint { settings: (0..3).map(|_| r.gen_range(0..2)).collect(), allowed: vec![r.gen_range(0..2)] })
            .collect();
        let a = lhv_search(3, 2, 2, &cs).unwrap();
        cs.reverse();
        let b = lhv_search(3, 2, 2, &cs).unwrap();
        assert_eq!(a.examined, 64);
        assert_eq!(a.satisfying, b.satisfying);
    }
}

#[test]
fn enumeration_guard() {
    assert!(matches!(lhv_search(4, 2, 2, &[]), Err(NonlocalityError::TooLarge(4, 2))));
    assert_eq!(lhv_search(2, 1, 3, &[]).unwrap().examined, 9);
}
