//! Random diagrams, states and helpers shared by the integration tests.
#![allow(dead_code)]

use gct::diagram::{Diagram, Phase, SystemType};
use gct::models::{Matrix, Model, Observable};
use gct::C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q() -> SystemType {
    SystemType::self_dual("Q")
}

pub fn x() -> SystemType {
    SystemType::self_dual("X")
}

/// `id_left ⊗ d ⊗ id_right` inside a `width`-wire layer.
pub fn layer(sys: &SystemType, left: usize, d: &Diagram, right: usize) -> Diagram {
    Diagram::identity(&vec![sys.clone(); left]).tensor(d).tensor(&Diagram::identity(&vec![sys.clone(); right]))
}

fn swap_layer(sys: &SystemType, width: usize, i: usize) -> Diagram {
    layer(sys, i, &Diagram::swap(sys, sys), width - i - 2)
}

pub fn random_angle(rng: &mut impl Rng) -> f64 {
    rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)
}

/// A qubit circuit on `width` wires built from phased Z and X gates, CNOTs and swaps.
pub fn random_circuit(rng: &mut impl Rng, width: usize, depth: usize) -> Diagram {
    let sig = gct::signatures::qucirc();
    let sys = q();
    let mut d = Diagram::identity(&vec![sys.clone(); width]);
    for _ in 0..depth {
        let i = rng.gen_range(0..width);
        let step = match rng.gen_range(0..4) {
            0 => layer(&sys, i, &sig.phased("Z", random_angle(rng)), width - i - 1),
            1 => layer(&sys, i, &sig.phased("X", random_angle(rng)), width - i - 1),
            2 if width >= 2 => {
                let i = rng.gen_range(0..width - 1);
                layer(&sys, i, &sig.gen("CX"), width - i - 2)
            }
            3 if width >= 2 => swap_layer(&sys, width, rng.gen_range(0..width - 1)),
            _ => continue,
        };
        d = d.compose(&step).unwrap();
    }
    d
}

/// Random acyclic network of white and gray qubit spiders with random phases. Starts
/// on `inputs` wires; the output count is whatever remains.
pub fn random_spider_network(rng: &mut impl Rng, inputs: usize, steps: usize) -> Diagram {
    let sys = q();
    let mut w = inputs;
    let mut d = Diagram::identity(&vec![sys.clone(); w]);
    for _ in 0..steps {
        let k = rng.gen_range(0..=w.min(3));
        let l = rng.gen_range(if w - k == 0 { 1 } else { 0 }..=3);
        if w - k + l > 5 {
            continue;
        }
        let i = rng.gen_range(0..=w - k);
        let colour = if rng.gen_bool(0.5) { "white" } else { "gray" };
        let phase = if rng.gen_bool(0.3) { Phase::Zero } else { Phase::angle(random_angle(rng)) };
        let s = Diagram::spider(colour, &sys, k, l, phase);
        d = d.compose(&layer(&sys, i, &s, w - i - k)).unwrap();
        w = w - k + l;
        if w >= 2 && rng.gen_bool(0.3) {
            d = d.compose(&swap_layer(&sys, w, rng.gen_range(0..w - 1))).unwrap();
        }
    }
    d
}

/// A connected composite of `μ, η, δ, ε` of `colour` with `m` inputs and `n` outputs.
pub fn random_frobenius(rng: &mut impl Rng, colour: &str, m: usize, n: usize, steps: usize) -> Diagram {
    let sys = q();
    let sp = |a, b| Diagram::spider(colour, &sys, a, b, Phase::Zero);
    let mut d;
    let mut w;
    if m == 0 {
        d = sp(0, 1);
        w = 1;
    } else {
        d = Diagram::identity(&vec![sys.clone(); m]);
        w = m;
    }
    for _ in 0..steps {
        let step = match rng.gen_range(0..5) {
            0 if w >= 2 => {
                let i = rng.gen_range(0..w - 1);
                w -= 1;
                layer(&sys, i, &sp(2, 1), w - i - 1)
            }
            1 if w < 5 => {
                let i = rng.gen_range(0..w);
                w += 1;
                layer(&sys, i, &sp(1, 2), w - i - 2)
            }
            2 => {
                // Unit merged into a wire from either side.
                let i = rng.gen_range(0..w);
                let unit = if rng.gen_bool(0.5) { sp(0, 1).tensor(&Diagram::identity(std::slice::from_ref(&sys))) } else { Diagram::identity(std::slice::from_ref(&sys)).tensor(&sp(0, 1)) };
                layer(&sys, i, &unit.compose(&sp(2, 1)).unwrap(), w - i - 1)
            }
            3 => {
                let i = rng.gen_range(0..w);
                let counit = if rng.gen_bool(0.5) { sp(1, 0).tensor(&Diagram::identity(std::slice::from_ref(&sys))) } else { Diagram::identity(std::slice::from_ref(&sys)).tensor(&sp(1, 0)) };
                layer(&sys, i, &sp(1, 2).compose(&counit).unwrap(), w - i - 1)
            }
            4 if w >= 2 => swap_layer(&sys, w, rng.gen_range(0..w - 1)),
            _ => continue,
        };
        d = d.compose(&step).unwrap();
    }
    while w > 1 {
        let i = rng.gen_range(0..w - 1);
        w -= 1;
        d = d.compose(&layer(&sys, i, &sp(2, 1), w - i - 1)).unwrap();
    }
    match n {
        0 => d.compose(&sp(1, 0)).unwrap(),
        _ => {
            while w < n {
                let i = rng.gen_range(0..w);
                w += 1;
                d = d.compose(&layer(&sys, i, &sp(1, 2), w - i - 2)).unwrap();
            }
            d
        }
    }
}

/// Random diagram of the bialgebra fragment: white copies `1 -> k` and gray merges
/// `k -> 1` on the `X` system.
pub fn random_fragment(rng: &mut impl Rng, n_in: usize, n_out: usize, steps: usize) -> Diagram {
    let sys = x();
    let mut w = n_in;
    let mut d = Diagram::identity(&vec![sys.clone(); w]);
    let copy = |k| Diagram::spider("white", &x(), 1, k, Phase::Zero);
    let merge = |k| Diagram::spider("gray", &x(), k, 1, Phase::Zero);
    for _ in 0..steps {
        let step = match rng.gen_range(0..4) {
            0 if (1..5).contains(&w) => {
                let k = [0, 2, 2, 3][rng.gen_range(0..4)];
                let i = rng.gen_range(0..w);
                w = w - 1 + k;
                layer(&sys, i, &copy(k), w - i - k)
            }
            1 => {
                let k = [0, 2, 2, 3][rng.gen_range(0..4)];
                if k > w || w - k + 1 > 5 {
                    continue;
                }
                let i = rng.gen_range(0..=w - k);
                w = w - k + 1;
                layer(&sys, i, &merge(k), w - i - 1)
            }
            2 if w >= 2 => swap_layer(&sys, w, rng.gen_range(0..w - 1)),
            _ => continue,
        };
        d = d.compose(&step).unwrap();
    }
    while w > n_out {
        let i = rng.gen_range(0..w - 1);
        w -= 1;
        d = d.compose(&layer(&sys, i, &merge(2), w - i - 1)).unwrap();
    }
    while w < n_out {
        if w == 0 {
            d = d.compose(&merge(0)).unwrap();
            w = 1;
            continue;
        }
        let i = rng.gen_range(0..w);
        w += 1;
        d = d.compose(&layer(&sys, i, &copy(2), w - i - 2)).unwrap();
    }
    d
}

pub fn random_complex(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix<C64> {
    Matrix::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// `AA† / Tr(AA†)` for a random `A`.
pub fn random_density(rng: &mut impl Rng, d: usize) -> Matrix<C64> {
    let a = random_complex(rng, d, d);
    let rho = a.compose(&a.dagger());
    let t = rho.trace();
    rho.scale(C64::new(1.0, 0.0) / t)
}

/// Model binding one observable as colour `c` on `Q`.
pub fn single_colour_model<S: gct::models::Scalar>(obs: &Observable<S>) -> Model<S> {
    Model::new(obs.name.clone()).with_dim("Q", obs.dim()).with_colour("c", obs.clone())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &Matrix<C64>) -> f64 {
    let n = m.rows();
    let mat = nalgebra::DMatrix::from_fn(n, n, |r, c| {
        let z = m.get(r, c);
        nalgebra::Complex::new(z.re, z.im)
    });
    let h = (mat.clone() + mat.adjoint()) * nalgebra::Complex::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}
