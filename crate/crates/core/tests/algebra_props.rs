mod common;

use common::*;
use gct::algebra::*;
use gct::diagram::Phase;
use gct::models::fixtures::{x_basis, x_observable, y_basis, y_observable, z_observable};
use gct::models::{compare, Compare, EqualityMode, Matrix, Observable};
use gct::C64;
use proptest::prelude::*;

fn spider_theorem<S: Compare>(obs: &Observable<S>, seed: u64, tol: f64) {
    let mut r = rng(seed);
    let m = single_colour_model(obs);
    for _ in 0..50 {
        use rand::Rng;
        let (a, b) = (r.gen_range(0..=3), r.gen_range(0..=3));
        let d = random_frobenius(&mut r, "c", a, b, 8);
        let got = m.interpret(&d).unwrap();
        let want = obs.spider(a, b, &Phase::Zero).unwrap();
        let c = S::compare_with(&got, &want, EqualityMode::Tolerance(tol));
        assert!(c.equal, "{} ({a},{b}) deviation {}", obs.name, c.deviation);
    }
}

#[test]
fn spider_theorem_complex_fixtures() {
    for (k, obs) in [z_observable(), x_observable(), y_observable()].iter().enumerate() {
        spider_theorem(obs, 10 + k as u64, 1e-9);
    }
    let g = group_algebra_pair(&AbelianGroup::new(&[3]));
    spider_theorem(&g.white, 20, 1e-9);
}

#[test]
fn spider_theorem_relational_fixtures() {
    let (f, s) = (frel_pair(), spek_pair());
    for (k, obs) in [&f.white, &f.gray, &s.white, &s.gray].into_iter().enumerate() {
        spider_theorem(obs, 30 + k as u64, 0.0);
    }
}

#[test]
fn spider_sums_rebuild_copy_and_delete() {
    for basis in [x_basis(), y_basis(), vec![Matrix::basis(2, 0), Matrix::basis(2, 1)]] {
        let obs = Observable::from_basis("b", basis.clone());
        let mut delta = Matrix::zeros(4, 2);
        let mut eps = Matrix::zeros(1, 2);
        for x in &basis {
            delta = delta.add(&x.kron(x).compose(&x.dagger()));
            eps = eps.add(&x.dagger());
        }
        assert!(delta.max_abs_diff(&obs.delta()) < 1e-12);
        assert!(eps.max_abs_diff(&obs.epsilon()) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn phase_action_is_a_homomorphism(a in -7.0f64..7.0, b in -7.0f64..7.0) {
        let z = z_observable();
        let lam = |p: &Phase| z.phase_action(&z.phase_point(p).unwrap());
        let (pa, pb) = (Phase::angle(a), Phase::angle(b));
        let sum = pa.add(&pb).unwrap();
        prop_assert!(lam(&pa).compose(&lam(&pb)).max_abs_diff(&lam(&sum)) < 1e-12);
        prop_assert!(lam(&pb).compose(&lam(&pa)).max_abs_diff(&lam(&sum)) < 1e-12);
    }

    #[test]
    fn hopf_implies_unbiased(a in 0.0f64..1.5) {
        // Rotating the gray basis of the qubit pair by a Z phase keeps it unbiased; rotating
        // by an X angle generally does not.
        let z = z_observable();
        for gray in [
            x_basis().iter().map(|v| gct::models::fixtures::z_rotation(a).compose(v)).collect::<Vec<_>>(),
            x_basis().iter().map(|v| gct::models::fixtures::x_rotation(a).compose(v)).collect::<Vec<_>>(),
        ] {
            let pair = ObservablePair::new("p", z.clone(), Observable::from_basis("g", gray.clone()));
            if check_complementarity(&pair, LawMode::default()).passes("hopf") {
                for v in z.basis().unwrap() {
                    for w in &gray {
                        prop_assert!((v.inner(w).norm_sqr() - 0.5).abs() < 1e-9);
                    }
                }
            }
        }
    }
}

#[test]
fn strong_implies_plain_complementarity() {
    let mut pairs = vec![zx_pair(), f4_pair(0.0).unwrap()];
    for moduli in [vec![2], vec![3], vec![4], vec![2, 2]] {
        pairs.push(group_algebra_pair(&AbelianGroup::new(&moduli)));
    }
    for p in &pairs {
        let sc = check_strong_complementarity(p, LawMode::default());
        assert!(sc.all_pass(), "{sc}");
        assert!(check_complementarity(p, LawMode::default()).all_pass(), "{}", p.name);
    }
    let f = frel_pair();
    assert!(check_strong_complementarity(&f, LawMode::default()).all_pass());
    assert!(check_complementarity(&f, LawMode::default()).all_pass());
}

#[test]
fn qubit_antipode_is_identity() {
    let s = zx_pair().antipode();
    let c = compare(&s, &Matrix::identity(2), EqualityMode::UpToScalar(1e-12));
    assert!(c.equal, "{s:?}");
}

#[test]
fn same_observable_is_not_complementary() {
    let p = ObservablePair::new("Z/Z", z_observable(), z_observable());
    assert!(!check_complementarity(&p, LawMode::default()).passes("hopf"));
    let _ = C64::new(0.0, 0.0);
}
