//! Intended models of the fixture signatures.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;

use super::{Matrix, Model, Observable};
use crate::diagram::Phase;
use crate::signatures::{perm_name, permutations4, SIX_POINTS};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn mat(rows: usize, cols: usize, data: &[C64]) -> Matrix<C64> {
    Matrix::from_vec(rows, cols, data.to_vec())
}

/// `Z_α = diag(1, e^{iα})`.
pub fn z_rotation(a: f64) -> Matrix<C64> {
    mat(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, a)])
}

/// `X_β` with `cos(β/2)` on the diagonal and `-i sin(β/2)` off it.
pub fn x_rotation(b: f64) -> Matrix<C64> {
    let (co, si) = ((b / 2.0).cos(), (b / 2.0).sin());
    mat(2, 2, &[c(co, 0.0), c(0.0, -si), c(0.0, -si), c(co, 0.0)])
}

/// Representative of an angle in `(-π, π]`. `X_β` has period `4π`, so the model reads
/// stored angles here to keep `X_β† = X_{-β}` away from `β = π`.
pub fn centred(a: f64) -> f64 {
    let r = a.rem_euclid(std::f64::consts::TAU);
    if r > std::f64::consts::PI {
        r - std::f64::consts::TAU
    } else {
        r
    }
}

pub fn cnot() -> Matrix<C64> {
    let mut m = Matrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 1), (3, 2), (2, 3)] {
        m.set(r, col, c(1.0, 0.0));
    }
    m
}

pub fn ket(bits: &[C64]) -> Matrix<C64> {
    Matrix::column(bits.to_vec())
}

/// Normalised `|+>`, `|->`.
pub fn x_basis() -> Vec<Matrix<C64>> {
    let h = FRAC_1_SQRT_2;
    vec![ket(&[c(h, 0.0), c(h, 0.0)]), ket(&[c(h, 0.0), c(-h, 0.0)])]
}

/// Normalised `(|0> ± i|1>)/√2`.
pub fn y_basis() -> Vec<Matrix<C64>> {
    let h = FRAC_1_SQRT_2;
    vec![ket(&[c(h, 0.0), c(0.0, h)]), ket(&[c(h, 0.0), c(0.0, -h)])]
}

/// Qubit Z observable with angle phases.
pub fn z_observable() -> Observable<C64> {
    Observable::standard("Z", 2).with_circle_phases()
}

/// Qubit X observable with angle phases.
pub fn x_observable() -> Observable<C64> {
    Observable::from_basis("X", x_basis()).with_circle_phases()
}

/// Qubit Y observable with angle phases.
pub fn y_observable() -> Observable<C64> {
    Observable::from_basis("Y", y_basis()).with_circle_phases()
}

/// Six stabilizer points, normalised, in [`SIX_POINTS`] order.
pub fn stab_points() -> Vec<Matrix<C64>> {
    let mut v = vec![Matrix::basis(2, 0), Matrix::basis(2, 1)];
    v.extend(x_basis());
    v.extend(y_basis());
    v
}

/// Qubit model of `qucirc`.
pub fn qubit() -> Model<C64> {
    Model::new("qubit")
        .with_dim("Q", 2)
        .with_box("ket0", Matrix::basis(2, 0))
        .with_box("ket1", Matrix::basis(2, 1))
        .with_box("bra0", Matrix::basis(2, 0).dagger())
        .with_box("bra1", Matrix::basis(2, 1).dagger())
        .with_phased_box("Z", z_rotation)
        .with_phased_box("X", |a| x_rotation(centred(a)))
        .with_box("CX", cnot())
        .with_colour("white", z_observable())
        .with_colour("gray", x_observable())
}

/// Permutation representation of `symgrp` on `C^d`.
pub fn symgrp(d: usize) -> Model<C64> {
    Model::new(format!("symgrp-R{d}")).with_dim("u", d)
}

fn bool_fn2(f: impl Fn(usize, usize) -> usize) -> Matrix<bool> {
    Matrix::function(2, 4, |x| f(x / 2, x % 2))
}

/// Standard Boolean semantics of `boolcirc`.
pub fn bool_b() -> Model<bool> {
    Model::new("B")
        .with_dim("b", 2)
        .with_box("and", bool_fn2(|x, y| x & y))
        .with_box("or", bool_fn2(|x, y| x | y))
        .with_box("not", Matrix::function(2, 2, |x| 1 - x))
        .with_box("fan", Matrix::function(4, 2, |x| 3 * x))
}

/// Parity semantics: `∨` is XOR and `¬` is the identity.
pub fn bool_p() -> Model<bool> {
    Model::new("P")
        .with_dim("b", 2)
        .with_box("and", bool_fn2(|x, y| x & y))
        .with_box("or", bool_fn2(|x, y| x ^ y))
        .with_box("not", Matrix::identity(2))
        .with_box("fan", Matrix::function(4, 2, |x| 3 * x))
}

/// `X_{π/2} = (1/√(-2i)) [[1, -i], [-i, 1]]`.
pub fn x_quarter() -> Matrix<C64> {
    let s = C64::from_polar(FRAC_1_SQRT_2, PI / 4.0);
    mat(2, 2, &[s, s * c(0.0, -1.0), s * c(0.0, -1.0), s])
}

fn with_points<S: super::Scalar>(mut m: Model<S>, points: &[Matrix<S>]) -> Model<S> {
    for (name, p) in SIX_POINTS.iter().zip(points) {
        m = m.with_box(name, p.clone()).with_box(&format!("{name}dag"), p.dagger());
    }
    m
}

/// Unnormalised `b_0 + i^k b_1`, the `Z_4` phase points of a qubit basis observable.
fn z4_table(basis: &[Matrix<C64>]) -> Vec<(Phase, Matrix<C64>)> {
    let powers = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
    (1..4).map(|k| (Phase::cyclic(4, k as u32), basis[0].add(&basis[1].scale(powers[k])))).collect()
}

/// Stabilizer qubit model of `stab`: white is Z, gray is X, both with `Z_4` phases.
pub fn stab_model() -> Model<C64> {
    let z = Observable::standard("Z", 2);
    let zt = z4_table(z.basis().unwrap());
    let x = Observable::from_basis("X", x_basis());
    let xt = z4_table(x.basis().unwrap());
    let m = Model::new("stab-qubit")
        .with_dim("Q", 2)
        .with_box("zp", z_rotation(PI / 2.0))
        .with_box("zm", z_rotation(-PI / 2.0))
        .with_box("xp", x_quarter())
        .with_box("xm", x_quarter().dagger())
        .with_colour("white", z.with_phase_table(zt))
        .with_colour("gray", x.with_phase_table(xt));
    with_points(m, &stab_points())
}

/// Six Spekkens points as subsets of `{0,1,2,3}`, in [`SIX_POINTS`] order.
pub fn spek_points() -> Vec<Matrix<bool>> {
    [[0, 1], [2, 3], [0, 2], [1, 3], [0, 3], [1, 2]].iter().map(|s| Matrix::subset(4, s)).collect()
}

/// Tabulated white multiplication on four ontic states.
fn spek_white_product(x: usize, y: usize) -> Option<usize> {
    match (x, y) {
        (0, 0) | (1, 1) => Some(0),
        (0, 1) | (1, 0) => Some(1),
        (2, 2) | (3, 3) => Some(2),
        (2, 3) | (3, 2) => Some(3),
        _ => None,
    }
}

fn relation_mu(f: impl Fn(usize, usize) -> Option<usize>) -> Matrix<bool> {
    let mut mu = Matrix::zeros(4, 16);
    for x in 0..4 {
        for y in 0..4 {
            if let Some(z) = f(x, y) {
                mu.set(z, 4 * x + y, true);
            }
        }
    }
    mu
}

fn klein(a: u32, b: u32) -> Phase {
    Phase::element(&[2, 2], &[a, b])
}

/// White Spekkens observable: classical points `z0`, `z1`; phases `x0, y0, x1, y1`.
pub fn spek_white() -> Observable<bool> {
    let p = spek_points();
    Observable::new("spek-white", relation_mu(spek_white_product), Matrix::subset(4, &[0, 2]))
        .with_phase_table(vec![(klein(1, 0), p[4].clone()), (klein(0, 1), p[3].clone()), (klein(1, 1), p[5].clone())])
}

/// Gray Spekkens observable: the white one relabelled by the transposition `(1 2)`,
/// with classical points `x0`, `x1`.
pub fn spek_gray() -> Observable<bool> {
    let sigma = |x: usize| [0, 2, 1, 3][x];
    let p = spek_points();
    Observable::new("spek-gray", relation_mu(|x, y| spek_white_product(sigma(x), sigma(y)).map(sigma)), Matrix::subset(4, &[0, 1]))
        .with_phase_table(vec![(klein(1, 0), p[4].clone()), (klein(0, 1), p[1].clone()), (klein(1, 1), p[5].clone())])
}

pub fn perm_relation(p: &[usize; 4]) -> Matrix<bool> {
    Matrix::function(4, 4, |x| p[x])
}

/// Relational model of `spek`.
pub fn spek_model() -> Model<bool> {
    let mut m = Model::new("spek-frel").with_dim("T", 4).with_colour("white", spek_white()).with_colour("gray", spek_gray());
    for p in permutations4() {
        m = m.with_box(&perm_name(&p), perm_relation(&p));
    }
    with_points(m, &spek_points())
}

fn pauli() -> [Matrix<C64>; 3] {
    [
        mat(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        mat(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        mat(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
    ]
}

/// Rescales so the first nonzero entry is real and positive.
pub fn fix_global_phase(u: &Matrix<C64>) -> Matrix<C64> {
    let z = u.data().iter().find(|z| z.norm() > 1e-9).copied().unwrap_or(c(1.0, 0.0));
    u.scale(z.conj() / z.norm())
}

/// The single-qubit Clifford group modulo phase, generated by `Z_{π/2}` and `X_{π/2}`.
pub fn clifford_mod_phase() -> Vec<Matrix<C64>> {
    let gens = [z_rotation(PI / 2.0), x_quarter()];
    let mut group = vec![Matrix::<C64>::identity(2)];
    let mut i = 0;
    while i < group.len() {
        for g in &gens {
            let h = fix_global_phase(&g.compose(&group[i]));
            if !group.iter().any(|k| k.max_abs_diff(&h) < 1e-9) {
                group.push(h);
            }
        }
        i += 1;
    }
    group
}

/// Permutation a Clifford induces on the four body diagonals of the Bloch cube.
pub fn diagonal_action(u: &Matrix<C64>) -> [usize; 4] {
    let s = pauli();
    let r = |i: usize, j: usize| 0.5 * s[i].compose(u).compose(&s[j]).compose(&u.dagger()).trace().re;
    let diags: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let mut p = [0; 4];
    for (k, d) in diags.iter().enumerate() {
        let img: Vec<f64> = (0..3).map(|i| (0..3).map(|j| r(i, j) * d[j]).sum()).collect();
        p[k] = diags
            .iter()
            .position(|e| (0..3).all(|i| (img[i] - e[i]).abs() < 1e-9) || (0..3).all(|i| (img[i] + e[i]).abs() < 1e-9))
            .expect("Clifford does not permute the diagonals");
    }
    p
}

/// Toy model with `Z_4` phases: the stabilizer qubit, `u_k` being the Clifford acting
/// on the body diagonals as the `k`-th permutation.
pub fn toy_z4_model() -> Model<C64> {
    let cliffords = clifford_mod_phase();
    let z = Observable::standard("Z", 2);
    let zt = z4_table(z.basis().unwrap());
    let x = Observable::from_basis("X", x_basis());
    let xt = z4_table(x.basis().unwrap());
    let mut m = Model::new("toy-z4-qubit")
        .with_dim("T", 2)
        .with_colour("white", z.with_phase_table(zt))
        .with_colour("gray", x.with_phase_table(xt));
    for (k, p) in permutations4().iter().enumerate() {
        let u = cliffords.iter().find(|u| diagonal_action(u) == *p).expect("missing Clifford");
        m = m.with_box(&format!("u{k}"), u.clone());
    }
    with_points(m, &stab_points())
}

/// Toy model with `Z_2 x Z_2` phases: the Spekkens relations.
pub fn toy_z2xz2_model() -> Model<bool> {
    let mut m = Model::new("toy-z2xz2-frel").with_dim("T", 4).with_colour("white", spek_white()).with_colour("gray", spek_gray());
    for (k, p) in permutations4().iter().enumerate() {
        m = m.with_box(&format!("u{k}"), perm_relation(p));
    }
    with_points(m, &spek_points())
}

/// Model of the `bialg` signature over `Z_p`: white copies by splitting a group element
/// into summands, gray merges by comparing. A diagram of the fragment evaluates to the
/// transpose of `x ↦ χ x (mod p)` written as a 0/1 matrix.
pub fn cyclic_bialgebra(p: usize) -> Model<C64> {
    let mu = Matrix::from_fn(p, p * p, |r, col| if (col / p + col % p) % p == r { c(1.0, 0.0) } else { c(0.0, 0.0) });
    Model::new(format!("Z{p}-bialgebra"))
        .with_dim("X", p)
        .with_colour("white", Observable::new("white", mu, Matrix::basis(p, 0)))
        .with_colour("gray", Observable::standard("gray", p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations_are_unitary() {
        for a in [0.3, 1.0, 2.5] {
            for u in [z_rotation(a), x_rotation(a)] {
                assert!(u.dagger().compose(&u).max_abs_diff(&Matrix::identity(2)) < 1e-12);
            }
        }
        assert!(x_quarter().dagger().compose(&x_quarter()).max_abs_diff(&Matrix::identity(2)) < 1e-12);
    }

    #[test]
    fn x_quarter_is_x_rotation_up_to_phase() {
        let r = x_rotation(PI / 2.0);
        let q = x_quarter();
        let ratio = q.get(0, 0) / r.get(0, 0);
        assert!(q.max_abs_diff(&r.scale(ratio)) < 1e-12);
    }

    #[test]
    fn clifford_group_has_24_elements() {
        let g = clifford_mod_phase();
        assert_eq!(g.len(), 24);
        let mut perms: Vec<[usize; 4]> = g.iter().map(diagonal_action).collect();
        perms.sort();
        perms.dedup();
        assert_eq!(perms.len(), 24);
    }

    #[test]
    fn spek_points_are_distinct_pairs() {
        let p = spek_points();
        for i in 0..6 {
            assert_eq!(p[i].pairs().len(), 2);
            for j in 0..i {
                assert_ne!(p[i], p[j]);
            }
        }
    }
}
