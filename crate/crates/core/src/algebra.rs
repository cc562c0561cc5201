//! Observable structures and the laws relating pairs of them: Frobenius axioms,
//! classical points, phase groups, complementarity, coherence, strong complementarity.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use rand::Rng;
use thiserror::Error;

use crate::diagram::Phase;
use crate::models::{fmt_sig, Compare, EqualityMode, Matrix, Observable};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum AlgebraError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("candidate set is not closed: product of candidates {0} and {1} is missing")]
    IncompleteCandidates(usize, usize),
    #[error("no candidate equals the unit")]
    NoIdentity,
    #[error("bases are not mutually unbiased (deviation {0:e})")]
    NotUnbiased(f64),
    #[error("pair is not coherent: {0}")]
    NotCoherent(String),
    #[error("observable has no basis")]
    NoBasis,
    #[error("group of order {0} is not a product of the given moduli")]
    BadGroup(usize),
}

/// One checked law.
#[derive(Clone, Debug, PartialEq)]
pub struct LawLine {
    pub name: String,
    pub pass: bool,
    pub deviation: f64,
    pub scalar: Option<C64>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LawReport {
    pub subject: String,
    pub lines: Vec<LawLine>,
}

impl LawReport {
    pub fn new(subject: impl Into<String>) -> Self {
        Self { subject: subject.into(), lines: Vec::new() }
    }

    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn line(&self, name: &str) -> Option<&LawLine> {
        self.lines.iter().find(|l| l.name == name)
    }

    /// `false` when the line is missing.
    pub fn passes(&self, name: &str) -> bool {
        self.line(name).is_some_and(|l| l.pass)
    }

    fn push(&mut self, name: &str, c: crate::models::Comparison) {
        self.lines.push(LawLine { name: name.into(), pass: c.equal, deviation: c.deviation, scalar: c.scalar, note: None });
    }

    fn flag(&mut self, name: &str, pass: bool, note: impl Into<String>) {
        self.lines.push(LawLine { name: name.into(), pass, deviation: 0.0, scalar: None, note: Some(note.into()) });
    }

    fn extend(&mut self, prefix: &str, other: LawReport) {
        for mut l in other.lines {
            l.name = format!("{prefix}{}", l.name);
            self.lines.push(l);
        }
    }
}

fn fmt_c(z: C64, digits: usize) -> String {
    if z.im == 0.0 {
        fmt_sig(z.re, digits)
    } else {
        format!("({}, {})", fmt_sig(z.re, digits), fmt_sig(z.im, digits))
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            write!(f, "{} {} deviation={}", if l.pass { "PASS" } else { "FAIL" }, l.name, fmt_sig(l.deviation, 12))?;
            if let Some(s) = l.scalar {
                write!(f, " scalar={}", fmt_c(s, 12))?;
            }
            if let Some(n) = &l.note {
                write!(f, " ({n})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Tolerance and whether scaled laws may absorb a global scalar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LawMode {
    pub tol: f64,
    pub strict: bool,
}

impl Default for LawMode {
    fn default() -> Self {
        Self { tol: crate::models::DEFAULT_TOL, strict: false }
    }
}

impl LawMode {
    fn exact(&self) -> EqualityMode {
        EqualityMode::Tolerance(self.tol)
    }
    fn scaled(&self) -> EqualityMode {
        if self.strict {
            EqualityMode::Tolerance(self.tol)
        } else {
            EqualityMode::UpToScalar(self.tol)
        }
    }
}

fn cmp<S: Compare>(a: &Matrix<S>, b: &Matrix<S>, mode: EqualityMode) -> crate::models::Comparison {
    S::compare_with(a, b, mode)
}

fn id<S: Compare>(d: usize) -> Matrix<S> {
    Matrix::identity(d)
}

fn swap<S: Compare>(d: usize) -> Matrix<S> {
    Matrix::wire_permutation(&[d, d], &[1, 0])
}

fn nonzero<S: Compare>(s: S, tol: f64) -> bool {
    s.to_complex().norm() > tol
}

/// Frobenius-algebra laws for raw `(μ, η, δ, ε)`.
pub fn check_frobenius_raw<S: Compare>(
    subject: &str,
    mu: &Matrix<S>,
    eta: &Matrix<S>,
    delta: &Matrix<S>,
    eps: &Matrix<S>,
    mode: LawMode,
) -> Result<LawReport, AlgebraError> {
    let d = eta.rows();
    let expect = [("μ", mu.shape(), (d, d * d)), ("η", eta.shape(), (d, 1)), ("δ", delta.shape(), (d * d, d)), ("ε", eps.shape(), (1, d))];
    for (n, got, want) in expect {
        if got != want {
            return Err(AlgebraError::Shape(format!("{n} is {}x{}, expected {}x{}", got.0, got.1, want.0, want.1)));
        }
    }
    let m = mode.exact();
    let i = id::<S>(d);
    let mut r = LawReport::new(subject);
    r.push("associativity", cmp(&mu.compose(&mu.kron(&i)), &mu.compose(&i.kron(mu)), m));
    let ul = cmp(&mu.compose(&eta.kron(&i)), &i, m);
    let ur = cmp(&mu.compose(&i.kron(eta)), &i, m);
    r.push("unit", if ul.equal { ur } else { ul });
    r.push("commutativity", cmp(&mu.compose(&swap(d)), mu, m));
    r.push("coassociativity", cmp(&delta.kron(&i).compose(delta), &i.kron(delta).compose(delta), m));
    let cl = cmp(&eps.kron(&i).compose(delta), &i, m);
    let cr = cmp(&i.kron(eps).compose(delta), &i, m);
    r.push("counit", if cl.equal { cr } else { cl });
    r.push("cocommutativity", cmp(&swap::<S>(d).compose(delta), delta, m));
    let mid = delta.compose(mu);
    let fl = cmp(&i.kron(mu).compose(&delta.kron(&i)), &mid, m);
    let fr = cmp(&mu.kron(&i).compose(&i.kron(delta)), &mid, m);
    r.push("frobenius", if fl.equal { fr } else { fl });
    r.push("special", cmp(&mu.compose(delta), &i, m));
    let dl = cmp(delta, &mu.dagger(), m);
    let dr = cmp(eps, &eta.dagger(), m);
    r.push("dagger", if dl.equal { dr } else { dl });
    Ok(r)
}

/// Frobenius-algebra laws of an observable (†-SCFA when all pass).
pub fn check_frobenius<S: Compare>(obs: &Observable<S>, mode: LawMode) -> LawReport {
    check_frobenius_raw(&obs.name, obs.mu(), obs.eta(), &obs.delta(), &obs.epsilon(), mode).expect("observable shapes are checked on construction")
}

/// Indices of candidates copied by `δ` and deleted by `ε`.
pub fn classical_points<S: Compare>(obs: &Observable<S>, candidates: &[Matrix<S>], tol: f64) -> Vec<usize> {
    let delta = obs.delta();
    let eps = obs.epsilon();
    candidates
        .iter()
        .enumerate()
        .filter(|(_, k)| {
            k.shape() == (obs.dim(), 1)
                && cmp(&delta.compose(k), &k.kron(k), EqualityMode::Tolerance(tol)).equal
                && cmp(&eps.compose(k), &Matrix::scalar(S::one()), EqualityMode::Tolerance(tol)).equal
        })
        .map(|(i, _)| i)
        .collect()
}

/// All nonempty subsets of an `n`-element set, as boolean points.
pub fn all_relational_points(n: usize) -> Vec<Matrix<bool>> {
    (1..1usize << n).map(|mask| Matrix::from_fn(n, 1, |r, _| mask >> (n - 1 - r) & 1 == 1)).collect()
}

/// `O_a ⊗ O_b` with `μ = (μ_a ⊗ μ_b)(1 ⊗ σ ⊗ 1)`; basis products are kept.
pub fn product_observable<S: Compare>(a: &Observable<S>, b: &Observable<S>) -> Observable<S> {
    let (da, db) = (a.dim(), b.dim());
    let shuffle = Matrix::wire_permutation(&[da, db, da, db], &[0, 2, 1, 3]);
    let mu = a.mu().kron(b.mu()).compose(&shuffle);
    let eta = a.eta().kron(b.eta());
    let name = format!("{}⊗{}", a.name, b.name);
    match (a.basis(), b.basis()) {
        (Some(ba), Some(bb)) => {
            let basis = ba.iter().flat_map(|x| bb.iter().map(move |y| x.kron(y))).collect();
            Observable::from_basis(name, basis)
        }
        _ => Observable::new(name, mu, eta),
    }
}

/// `ψ_⊛ = (cap ∘ (1 ⊗ ψ))†`.
pub fn conjugate_point<S: Compare>(obs: &Observable<S>, psi: &Matrix<S>) -> Matrix<S> {
    obs.cap().compose(&Matrix::identity(obs.dim()).kron(psi)).dagger()
}

/// `ψ +_O φ = μ ∘ (ψ ⊗ φ)`.
pub fn add_points<S: Compare>(obs: &Observable<S>, psi: &Matrix<S>, phi: &Matrix<S>) -> Matrix<S> {
    obs.mu().compose(&psi.kron(phi))
}

/// Finite abelian group `Z_{m_1} × … × Z_{m_k}`. Elements are tuples in mixed radix with
/// the first factor most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    moduli: Vec<u32>,
}

impl AbelianGroup {
    pub fn new(moduli: &[u32]) -> Self {
        assert!(moduli.iter().all(|&m| m >= 1), "moduli must be positive");
        Self { moduli: moduli.to_vec() }
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().map(|&m| m as usize).product()
    }

    pub fn elements(&self) -> Vec<Vec<u32>> {
        (0..self.order()).map(|i| self.element(i)).collect()
    }

    pub fn element(&self, mut i: usize) -> Vec<u32> {
        let mut e = vec![0; self.moduli.len()];
        for (k, &m) in self.moduli.iter().enumerate().rev() {
            e[k] = (i % m as usize) as u32;
            i /= m as usize;
        }
        e
    }

    pub fn index(&self, e: &[u32]) -> usize {
        self.moduli.iter().zip(e).fold(0, |acc, (&m, &x)| acc * m as usize + (x % m) as usize)
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        self.moduli.iter().zip(a.iter().zip(b)).map(|(&m, (&x, &y))| (x + y) % m).collect()
    }

    pub fn neg(&self, a: &[u32]) -> Vec<u32> {
        self.moduli.iter().zip(a).map(|(&m, &x)| (m - x % m) % m).collect()
    }

    /// `table[i][j]` is the index of `element(i) + element(j)`.
    pub fn table(&self) -> Vec<Vec<usize>> {
        let els = self.elements();
        els.iter().map(|a| els.iter().map(|b| self.index(&self.add(a, b))).collect()).collect()
    }

    /// Least common multiple of the moduli.
    pub fn exponent(&self) -> u32 {
        self.moduli.iter().fold(1, |acc, &m| lcm(acc, m))
    }

    /// Sorted multiset of element orders.
    pub fn order_multiset(&self) -> Vec<usize> {
        orders_from_table(&self.table(), 0)
    }

    /// One representative per isomorphism class, as prime-power moduli.
    pub fn all_of_order(n: usize) -> Vec<AbelianGroup> {
        let mut out = vec![Vec::new()];
        for (p, e) in factorize(n) {
            let mut next = Vec::new();
            for part in partitions(e) {
                let powers: Vec<u32> = part.iter().map(|&k| (p as u32).pow(k)).collect();
                for base in &out {
                    let mut v: Vec<u32> = base.clone();
                    v.extend(&powers);
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(|m| AbelianGroup::new(&m).canonical()).collect()
    }

    /// Invariant-factor form `Z_{d_1} × … × Z_{d_k}` with `d_1 | d_2 | …`.
    pub fn canonical(&self) -> AbelianGroup {
        let mut by_prime: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for &m in &self.moduli {
            for (p, e) in factorize(m as usize) {
                by_prime.entry(p).or_default().push((p as u32).pow(e));
            }
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u32; len];
        for powers in by_prime.values_mut() {
            powers.sort_unstable_by(|a, b| b.cmp(a));
            for (k, q) in powers.iter().enumerate() {
                factors[k] *= q;
            }
        }
        factors.reverse();
        if factors.is_empty() {
            factors.push(1);
        }
        AbelianGroup { moduli: factors }
    }

    pub fn is_isomorphic(&self, other: &AbelianGroup) -> bool {
        self.canonical() == other.canonical()
    }

    /// The abelian group of the given order with this order multiset, if unique.
    pub fn classify(orders: &[usize]) -> Option<AbelianGroup> {
        let mut want = orders.to_vec();
        want.sort_unstable();
        let hits: Vec<_> = Self::all_of_order(orders.len()).into_iter().filter(|g| g.order_multiset() == want).collect();
        (hits.len() == 1).then(|| hits[0].clone())
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z{m}")).collect();
        write!(f, "{}", parts.join("×"))
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

fn factorize(mut n: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            go(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

fn orders_from_table(table: &[Vec<usize>], identity: usize) -> Vec<usize> {
    let mut orders: Vec<usize> = (0..table.len())
        .map(|g| {
            let (mut x, mut k) = (g, 1);
            while x != identity && k <= table.len() {
                x = table[x][g];
                k += 1;
            }
            k
        })
        .collect();
    orders.sort_unstable();
    orders
}

/// Phase group found among candidate points.
#[derive(Clone, Debug)]
pub struct PhaseGroup<S> {
    pub elements: Vec<Matrix<S>>,
    /// Position of each element in the candidate list.
    pub candidates: Vec<usize>,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    /// `None` when the order multiset does not pin down a unique abelian group.
    pub class: Option<AbelianGroup>,
}

impl<S> PhaseGroup<S> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn order_multiset(&self) -> Vec<usize> {
        orders_from_table(&self.table, self.identity)
    }

    /// Whether the table is that of `g` under the bijection `element(i) ↦ elements[i]`.
    pub fn matches_group(&self, g: &AbelianGroup) -> bool {
        self.table == g.table()
    }
}

/// Filters candidates with `ψ +_O ψ_⊛ = η` and tabulates `+_O` among them.
pub fn phase_group<S: Compare>(obs: &Observable<S>, candidates: &[Matrix<S>], mode: EqualityMode) -> Result<PhaseGroup<S>, AlgebraError> {
    let eta = obs.eta();
    let idx: Vec<usize> = (0..candidates.len())
        .filter(|&i| {
            let p = &candidates[i];
            p.shape() == (obs.dim(), 1) && cmp(&add_points(obs, p, &conjugate_point(obs, p)), eta, mode).equal
        })
        .collect();
    let elements: Vec<Matrix<S>> = idx.iter().map(|&i| candidates[i].clone()).collect();
    let identity = elements.iter().position(|p| cmp(p, eta, mode).equal).ok_or(AlgebraError::NoIdentity)?;
    let mut table = vec![vec![0; elements.len()]; elements.len()];
    for a in 0..elements.len() {
        for b in 0..elements.len() {
            let prod = add_points(obs, &elements[a], &elements[b]);
            table[a][b] = elements.iter().position(|p| cmp(&prod, p, mode).equal).ok_or(AlgebraError::IncompleteCandidates(idx[a], idx[b]))?;
        }
    }
    let orders = orders_from_table(&table, identity);
    Ok(PhaseGroup { class: AbelianGroup::classify(&orders), elements, candidates: idx, table, identity })
}

/// Samples angle phases of a basis observable: the sum of points, the conjugate as
/// inverse, and `Λ` being a unitary homomorphism.
pub fn circle_phase_check(obs: &Observable<C64>, samples: usize, rng: &mut impl Rng, mode: LawMode) -> LawReport {
    let tau = std::f64::consts::TAU;
    let mut r = LawReport::new(format!("{} circle phases", obs.name));
    let (mut add, mut inv, mut hom, mut unit) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut ok = true;
    for _ in 0..samples {
        let (a, b) = (rng.gen_range(0.0..tau), rng.gen_range(0.0..tau));
        let pts = (obs.phase_point(&Phase::angle(a)), obs.phase_point(&Phase::angle(b)), obs.phase_point(&Phase::angle(a + b)));
        let (Some(pa), Some(pb), Some(pab)) = pts else {
            ok = false;
            continue;
        };
        let c1 = cmp(&add_points(obs, &pa, &pb), &pab, mode.exact());
        let c2 = cmp(&add_points(obs, &pa, &conjugate_point(obs, &pa)), obs.eta(), mode.exact());
        let (la, lb) = (obs.phase_action(&pa), obs.phase_action(&pb));
        let lab = obs.phase_action(&pab);
        let c3 = cmp(&la.compose(&lb), &lab, mode.exact());
        let c4 = cmp(&lb.compose(&la), &lab, mode.exact());
        let c5 = cmp(&la.dagger().compose(&la), &Matrix::identity(obs.dim()), mode.exact());
        ok &= c1.equal && c2.equal && c3.equal && c4.equal && c5.equal;
        add = add.max(c1.deviation);
        inv = inv.max(c2.deviation);
        hom = hom.max(c3.deviation.max(c4.deviation));
        unit = unit.max(c5.deviation);
    }
    let tol = mode.tol;
    for (name, dev) in [("phase-sum", add), ("phase-inverse", inv), ("action-homomorphism", hom), ("action-unitary", unit)] {
        r.lines.push(LawLine { name: name.into(), pass: ok && dev <= tol, deviation: dev, scalar: None, note: Some(format!("{samples} samples")) });
    }
    r
}

/// Two observables on one carrier; white and gray in the diagrams.
#[derive(Clone, Debug)]
pub struct ObservablePair<S: crate::models::Scalar> {
    pub name: String,
    pub white: Observable<S>,
    pub gray: Observable<S>,
}

impl<S: Compare> ObservablePair<S> {
    pub fn new(name: impl Into<String>, white: Observable<S>, gray: Observable<S>) -> Self {
        assert_eq!(white.dim(), gray.dim(), "pair must share a carrier");
        Self { name: name.into(), white, gray }
    }

    pub fn dim(&self) -> usize {
        self.white.dim()
    }

    /// `S = (1 ⊗ cap_white) ∘ (cup_gray ⊗ 1)`.
    pub fn antipode(&self) -> Matrix<S> {
        let d = self.dim();
        let i = Matrix::identity(d);
        i.kron(&self.white.cap()).compose(&self.gray.cup().kron(&i))
    }

    /// `⟨η_gray|η_white⟩`.
    pub fn scalar(&self) -> S {
        self.gray.epsilon().compose(self.white.eta()).get(0, 0)
    }

    /// The same pair with colours exchanged.
    pub fn swapped(&self) -> Self {
        Self { name: format!("{} swapped", self.name), white: self.gray.clone(), gray: self.white.clone() }
    }
}

/// Hopf law `μ_gray ∘ (1 ⊗ S) ∘ δ_white ∝ η_gray ∘ ε_white`, plus mutual unbiasedness
/// of the two bases when both are known.
pub fn check_complementarity<S: Compare>(pair: &ObservablePair<S>, mode: LawMode) -> LawReport {
    let d = pair.dim();
    let lhs = pair.gray.mu().compose(&Matrix::identity(d).kron(&pair.antipode())).compose(&pair.white.delta());
    let rhs = pair.gray.eta().compose(&pair.white.epsilon());
    let mut r = LawReport::new(format!("{} complementarity", pair.name));
    r.push("hopf", cmp(&lhs, &rhs, mode.scaled()));
    if let Some(u) = unbiasedness(pair) {
        r.lines.push(LawLine { name: "unbiased".into(), pass: u <= mode.tol, deviation: u, scalar: None, note: Some(format!("|<v|w>|^2 = 1/{d}")) });
    }
    r
}

/// Largest deviation of `|<v_i|w_j>|²` from `1/D`, for complex bases.
fn unbiasedness<S: Compare>(pair: &ObservablePair<S>) -> Option<f64> {
    if !S::NUMERIC {
        return None;
    }
    let (a, b) = (pair.white.basis()?, pair.gray.basis()?);
    let d = pair.dim() as f64;
    let mut dev: f64 = 0.0;
    for v in a {
        for w in b {
            let ip = v.dagger().compose(w).get(0, 0).to_complex();
            dev = dev.max((ip.norm_sqr() * d - 1.0).abs() / d);
        }
    }
    Some(dev)
}

/// Whether `p` is a nonzero multiple of a classical point of `obs`:
/// `δ(p) · ε(p) = p ⊗ p` with `ε(p) ≠ 0`.
fn scaled_classical<S: Compare>(obs: &Observable<S>, p: &Matrix<S>, mode: LawMode) -> (bool, f64, S) {
    let e = obs.epsilon().compose(p).get(0, 0);
    let c = cmp(&obs.delta().compose(p).scale(e), &p.kron(p), mode.exact());
    (c.equal && nonzero(e, mode.tol), c.deviation, e)
}

/// Each unit is a scaled classical point of the other observable; the scalar
/// `⟨η_gray|η_white⟩` is reported and must be nonzero.
pub fn check_coherence<S: Compare>(pair: &ObservablePair<S>, mode: LawMode) -> LawReport {
    let mut r = LawReport::new(format!("{} coherence", pair.name));
    let (ok, dev, _) = scaled_classical(&pair.gray, pair.white.eta(), mode);
    r.lines.push(LawLine { name: "white-unit-gray-classical".into(), pass: ok, deviation: dev, scalar: None, note: None });
    let (ok, dev, _) = scaled_classical(&pair.white, pair.gray.eta(), mode);
    r.lines.push(LawLine { name: "gray-unit-white-classical".into(), pass: ok, deviation: dev, scalar: None, note: None });
    let s = pair.scalar();
    r.lines.push(LawLine { name: "scalar-cancellable".into(), pass: nonzero(s, mode.tol), deviation: 0.0, scalar: Some(s.to_complex()), note: None });
    r
}

/// Scaled bialgebra laws with gray multiplying and white copying.
fn bialgebra_lines<S: Compare>(pair: &ObservablePair<S>, mode: LawMode) -> LawReport {
    let d = pair.dim();
    let (w, g) = (&pair.white, &pair.gray);
    let i = Matrix::<S>::identity(d);
    let mut r = LawReport::new("bialgebra");
    let middle = i.kron(&swap::<S>(d)).kron(&i);
    let lhs = w.delta().compose(g.mu());
    let rhs = g.mu().kron(g.mu()).compose(&middle).compose(&w.delta().kron(&w.delta()));
    r.push("bialgebra", cmp(&lhs, &rhs, mode.scaled()));
    r.push("copy-unit", cmp(&w.delta().compose(g.eta()), &g.eta().kron(g.eta()), mode.scaled()));
    r.push("delete-product", cmp(&w.epsilon().compose(g.mu()), &w.epsilon().kron(&w.epsilon()), mode.scaled()));
    let s = w.epsilon().compose(g.eta()).get(0, 0);
    r.lines.push(LawLine { name: "unit-counit-nonzero".into(), pass: nonzero(s, mode.tol), deviation: 0.0, scalar: Some(s.to_complex()), note: None });
    r
}

/// Antipode is self-adjoint and a (co)monoid homomorphism for both colours.
fn antipode_lines<S: Compare>(pair: &ObservablePair<S>, mode: LawMode) -> LawReport {
    let s = pair.antipode();
    let ss = s.kron(&s);
    let mut r = LawReport::new("antipode");
    r.push("antipode-self-adjoint", cmp(&s.dagger(), &s, mode.scaled()));
    for (c, o) in [("white", &pair.white), ("gray", &pair.gray)] {
        r.push(&format!("antipode-{c}-monoid-hom"), cmp(&s.compose(o.mu()), &o.mu().compose(&ss), mode.scaled()));
        r.push(&format!("antipode-{c}-comonoid-hom"), cmp(&o.delta().compose(&s), &ss.compose(&o.delta()), mode.scaled()));
    }
    r
}

/// Coherence plus the scaled bialgebra law; on success also the implied
/// complementarity and the antipode properties.
pub fn check_strong_complementarity<S: Compare>(pair: &ObservablePair<S>, mode: LawMode) -> LawReport {
    let mut r = LawReport::new(format!("{} strong complementarity", pair.name));
    let coh = check_coherence(pair, mode);
    let coherent = coh.all_pass();
    r.extend("", coh);
    let bi = bialgebra_lines(pair, mode);
    let sc = coherent && bi.all_pass();
    r.extend("", bi);
    if sc {
        r.extend("implies-", check_complementarity(pair, mode));
        r.extend("", antipode_lines(pair, mode));
    }
    r
}

/// Rephases two unbiased orthonormal bases so the pair is coherent:
/// `a_i' = √D ⟨a_i|b_0⟩ a_i`, then `b_j' = √D ⟨b_j|a_0'⟩ b_j`.
pub fn coherify(white: &[Matrix<C64>], gray: &[Matrix<C64>], tol: f64) -> Result<ObservablePair<C64>, AlgebraError> {
    let d = white.len();
    if gray.len() != d || white.iter().chain(gray).any(|v| v.shape() != (d, 1)) {
        return Err(AlgebraError::Shape("bases must be D vectors of length D".into()));
    }
    let sd = (d as f64).sqrt();
    let mut dev: f64 = 0.0;
    for a in white {
        for b in gray {
            dev = dev.max((a.inner(b).norm() * sd - 1.0).abs());
        }
    }
    if dev > tol {
        return Err(AlgebraError::NotUnbiased(dev));
    }
    let a2: Vec<_> = white.iter().map(|a| a.scale(a.inner(&gray[0]) * sd)).collect();
    let b2: Vec<_> = gray.iter().map(|b| b.scale(b.inner(&a2[0]) * sd)).collect();
    Ok(ObservablePair::new("coherified", Observable::from_basis("white", a2), Observable::from_basis("gray", b2)))
}

/// Group-algebra pair of `G`: gray copies the element basis `|g>`, white is
/// `|g>⊗|h> ↦ |g+h>/√D` with unit `√D|0>` (the copying structure of the characters).
pub fn group_algebra_pair(g: &AbelianGroup) -> ObservablePair<C64> {
    let d = g.order();
    let els = g.elements();
    let chars: Vec<Matrix<C64>> = els
        .iter()
        .map(|k| {
            Matrix::from_fn(d, 1, |r, _| {
                let x = &els[r];
                let t: f64 = g.moduli().iter().zip(k.iter().zip(x)).map(|(&m, (&a, &b))| (a * b) as f64 / m as f64).sum();
                C64::from_polar(1.0 / (d as f64).sqrt(), std::f64::consts::TAU * t)
            })
        })
        .collect();
    ObservablePair::new(format!("group-algebra {g}"), Observable::from_basis("white", chars), Observable::standard("gray", d))
}

/// Gray classical points scaled by `⟨η_gray|η_white⟩`, as a group under `+_white`.
pub fn gray_classical_group<S: Compare>(pair: &ObservablePair<S>, mode: EqualityMode) -> Result<PhaseGroup<S>, AlgebraError> {
    let basis = pair.gray.basis().ok_or(AlgebraError::NoBasis)?;
    let s = pair.scalar();
    let pts: Vec<Matrix<S>> = basis.iter().map(|k| k.scale(s)).collect();
    phase_group(&pair.white, &pts, mode)
}

/// `μ_white^(k) ∘ δ_gray^(k) ∝ η_white ∘ ε_gray`.
pub fn check_exponent_law<S: Compare>(pair: &ObservablePair<S>, k: usize, mode: LawMode) -> LawReport {
    let lhs = pair.white.mu_n(k).compose(&pair.gray.delta_n(k));
    let rhs = pair.white.eta().compose(&pair.gray.epsilon());
    let mut r = LawReport::new(format!("{} exponent {k}", pair.name));
    r.push(&format!("exponent-{k}"), cmp(&lhs, &rhs, mode.scaled()));
    r
}

/// Sharpness: projecting two legs of the white GHZ state onto gray classical points
/// leaves the third leg proportional to a gray classical point (or zero). When it
/// holds, the bialgebra law is checked as its consequence.
pub fn check_sharpness<S: Compare>(pair: &ObservablePair<S>, gray_points: &[Matrix<S>], mode: LawMode) -> LawReport {
    let mut r = LawReport::new(format!("{} sharpness", pair.name));
    let coh = check_coherence(pair, mode);
    let coherent = coh.all_pass();
    r.flag("precondition-coherent", coherent, if coherent { "coherent" } else { "pair is not coherent" });
    if !coherent {
        return r;
    }
    let ghz = pair.white.delta_n(3).compose(pair.white.eta());
    let d = pair.dim();
    let mut sharp = true;
    let mut worst: f64 = 0.0;
    for a in gray_points {
        for b in gray_points {
            let proj = a.dagger().kron(&b.dagger()).kron(&Matrix::identity(d));
            let left = proj.compose(&ghz);
            if left.is_zero() || left.to_complex_max() <= mode.tol {
                continue;
            }
            let best = gray_points.iter().map(|k| cmp(&left, k, mode.scaled())).min_by(|x, y| x.deviation.total_cmp(&y.deviation));
            match best {
                Some(c) if c.equal => worst = worst.max(c.deviation),
                Some(c) => {
                    sharp = false;
                    worst = worst.max(c.deviation);
                }
                None => sharp = false,
            }
        }
    }
    r.lines.push(LawLine { name: "sharp".into(), pass: sharp, deviation: worst, scalar: None, note: None });
    if sharp {
        r.extend("implies-", bialgebra_lines(pair, mode));
    }
    r
}

trait MaxAbs {
    fn to_complex_max(&self) -> f64;
}

impl<S: Compare> MaxAbs for Matrix<S> {
    fn to_complex_max(&self) -> f64 {
        self.data().iter().map(|z| z.to_complex().norm()).fold(0.0, f64::max)
    }
}

/// Agreement on classical points determines maps out of the carrier.
/// Boolean: exhaustive over all relations into a 2-element set.
pub fn enough_classical_points_relational(obs: &Observable<bool>) -> bool {
    let d = obs.dim();
    let pts: Vec<Matrix<bool>> = classical_points(obs, &all_relational_points(d), 0.0).into_iter().map(|i| all_relational_points(d)[i].clone()).collect();
    let rels: Vec<Matrix<bool>> = (0..1usize << (2 * d)).map(|m| Matrix::from_fn(2, d, |r, c| m >> (r * d + c) & 1 == 1)).collect();
    let sig = |f: &Matrix<bool>| pts.iter().map(|k| f.compose(k).into_data()).collect::<Vec<_>>();
    let mut seen = std::collections::HashMap::new();
    for f in &rels {
        if let Some(prev) = seen.insert(sig(f), f.clone()) {
            if &prev != f {
                return false;
            }
        }
    }
    true
}

/// Complex: classical points among the candidates span the carrier, and a random map is
/// reconstructed from its values on them.
pub fn enough_classical_points_complex(obs: &Observable<C64>, candidates: &[Matrix<C64>], rng: &mut impl Rng, tol: f64) -> bool {
    let d = obs.dim();
    let pts: Vec<&Matrix<C64>> = classical_points(obs, candidates, tol).into_iter().map(|i| &candidates[i]).collect();
    if pts.is_empty() {
        return false;
    }
    let k = Matrix::from_fn(d, pts.len(), |r, c| pts[c].get(r, 0));
    if k.rank(1e-9) < d {
        return false;
    }
    // f = (f K) K⁺ with K⁺ the pseudo-inverse via the Gram matrix when K is square and invertible.
    let f = Matrix::from_fn(2, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let fk = f.compose(&k);
    match invert(&k.dagger().compose(&k)) {
        Some(g) => fk.compose(&g).compose(&k.dagger()).max_abs_diff(&f) <= 1e-8,
        None => false,
    }
}

/// Gauss-Jordan inverse of a square complex matrix.
pub fn invert(m: &Matrix<C64>) -> Option<Matrix<C64>> {
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = Matrix::<C64>::identity(n);
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a.get(x, col).norm().total_cmp(&a.get(y, col).norm()))?;
        if a.get(piv, col).norm() < 1e-12 {
            return None;
        }
        for c in 0..n {
            let (t1, t2) = (a.get(col, c), a.get(piv, c));
            a.set(col, c, t2);
            a.set(piv, c, t1);
            let (t1, t2) = (inv.get(col, c), inv.get(piv, c));
            inv.set(col, c, t2);
            inv.set(piv, c, t1);
        }
        let p = a.get(col, col);
        for c in 0..n {
            a.set(col, c, a.get(col, c) / p);
            inv.set(col, c, inv.get(col, c) / p);
        }
        for r in 0..n {
            if r != col {
                let f = a.get(r, col);
                for c in 0..n {
                    a.set(r, c, a.get(r, c) - f * a.get(col, c));
                    inv.set(r, c, inv.get(r, c) - f * inv.get(col, c));
                }
            }
        }
    }
    Some(inv)
}

/// Outcome of presenting several observables as pairwise strongly complementary.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxTwoReport {
    pub dim: usize,
    /// Numerical verdict of each pairwise strong-complementarity premise.
    pub premises: Vec<(String, bool)>,
    pub witness: Option<RankWitness>,
}

impl MaxTwoReport {
    pub fn contradiction(&self) -> bool {
        self.witness.is_some()
    }
}

/// The premises force `1 = Λ_black(η_black) ∝ Λ_black(y)` for a black classical point
/// `y`, yet the two sides have different ranks.
#[derive(Clone, Debug, PartialEq)]
pub struct RankWitness {
    /// `|⟨η_gray|η_black⟩|`, nonzero so both units sit on the same white classical point.
    pub unit_overlap: f64,
    /// Black classical point the premises force `η_black` onto.
    pub forced_point: usize,
    pub identity_rank: usize,
    pub forced_rank: usize,
}

/// Checks the premises numerically and derives the rank contradiction for any three
/// observables presented as pairwise strongly complementary.
pub fn max_two_check(observables: &[Observable<C64>], mode: LawMode) -> MaxTwoReport {
    let dim = observables.first().map_or(0, |o| o.dim());
    let mut premises = Vec::new();
    for i in 0..observables.len() {
        for j in i + 1..observables.len() {
            let pair = ObservablePair::new(format!("{}/{}", observables[i].name, observables[j].name), observables[i].clone(), observables[j].clone());
            premises.push((pair.name.clone(), check_strong_complementarity(&pair, mode).all_pass()));
        }
    }
    if dim < 2 || observables.len() < 3 {
        return MaxTwoReport { dim, premises, witness: None };
    }
    let (gray, black) = (&observables[1], &observables[2]);
    let Some(basis) = black.basis() else {
        return MaxTwoReport { dim, premises, witness: None };
    };
    let unit_overlap = gray.eta().inner(black.eta()).norm();
    let forced_point = (0..basis.len()).max_by(|&a, &b| basis[a].inner(gray.eta()).norm().total_cmp(&basis[b].inner(gray.eta()).norm())).unwrap_or(0);
    let identity_rank = black.phase_action(black.eta()).rank(1e-9);
    let forced_rank = black.phase_action(&basis[forced_point]).rank(1e-9);
    let witness = (forced_rank < identity_rank).then_some(RankWitness { unit_overlap, forced_point, identity_rank, forced_rank });
    MaxTwoReport { dim, premises, witness }
}

impl fmt::Display for MaxTwoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, ok) in &self.premises {
            writeln!(f, "premise {n}: {}", if *ok { "holds" } else { "fails numerically" })?;
        }
        match &self.witness {
            Some(w) => writeln!(
                f,
                "contradiction: identity has rank {} but is forced proportional to a map of rank {} (unit overlap {})",
                w.identity_rank,
                w.forced_rank,
                fmt_sig(w.unit_overlap, 12)
            ),
            None => writeln!(f, "no contradiction (dimension {})", self.dim),
        }
    }
}

/// Complex Hadamard `F4(a)/2` with white the standard basis: complementary for every `a`,
/// strongly complementary only when `a = 0`.
pub fn f4_pair(a: f64) -> Result<ObservablePair<C64>, AlgebraError> {
    let i = C64::new(0.0, 1.0);
    let e = C64::from_polar(1.0, a);
    let one = C64::new(1.0, 0.0);
    let rows = [[one, one, one, one], [one, i * e, -one, -i * e], [one, -one, one, -one], [one, -i * e, -one, i * e]];
    let gray: Vec<Matrix<C64>> = (0..4).map(|c| Matrix::column((0..4).map(|r| rows[r][c] * 0.5).collect())).collect();
    let white: Vec<Matrix<C64>> = (0..4).map(|k| Matrix::basis(4, k)).collect();
    let mut p = coherify(&white, &gray, 1e-9)?;
    p.name = format!("F4({a})");
    Ok(p)
}

/// Relational pair on `{0,1}`: white copies, gray is addition mod 2.
pub fn frel_pair() -> ObservablePair<bool> {
    let white = Observable::<bool>::standard("white", 2);
    let delta = Matrix::from_fn(4, 2, |r, c| (r >> 1 ^ r & 1) == c);
    let gray = Observable::from_comonoid("gray", &delta, &Matrix::subset(2, &[0]).dagger());
    ObservablePair::new("frel", white, gray)
}

/// Spekkens pair on four ontic states.
pub fn spek_pair() -> ObservablePair<bool> {
    ObservablePair::new("spek", crate::models::fixtures::spek_white(), crate::models::fixtures::spek_gray())
}

/// Qubit pair with white Z and gray X, both with angle phases.
pub fn zx_pair() -> ObservablePair<C64> {
    use crate::models::fixtures::{x_observable, z_observable};
    ObservablePair::new("Z/X", z_observable(), x_observable())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::fixtures::{spek_points, stab_points, x_basis, y_basis, z_observable};
    use rand::SeedableRng;

    fn mode() -> LawMode {
        LawMode::default()
    }

    #[test]
    fn z_copy_is_scfa() {
        let r = check_frobenius(&z_observable(), mode());
        assert!(r.all_pass(), "{r}");
        assert_eq!(r.lines.len(), 9);
    }

    #[test]
    fn frel_gray_is_scfa() {
        let r = check_frobenius(&frel_pair().gray, mode());
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn uniform_relation_is_not_special() {
        let delta = Matrix::from_fn(4, 2, |_, _| true);
        let eps = Matrix::from_fn(1, 2, |_, _| true);
        let r = check_frobenius_raw("uniform", &delta.dagger(), &eps.dagger(), &delta, &eps, mode()).unwrap();
        assert!(!r.all_pass());
        assert!(r.passes("frobenius"));
        assert!(!r.passes("special"));
        assert!(!r.passes("counit"));
    }

    #[test]
    fn shape_errors() {
        let mu = Matrix::<bool>::zeros(2, 3);
        let eta = Matrix::zeros(2, 1);
        assert!(matches!(check_frobenius_raw("bad", &mu, &eta, &mu.dagger(), &eta.dagger(), mode()), Err(AlgebraError::Shape(_))));
    }

    #[test]
    fn stab_classical_points() {
        assert_eq!(classical_points(&z_observable(), &stab_points(), 1e-9), vec![0, 1]);
    }

    #[test]
    fn spek_classical_points() {
        assert_eq!(classical_points(&spek_pair().white, &spek_points(), 0.0), vec![0, 1]);
        assert_eq!(classical_points(&spek_pair().gray, &spek_points(), 0.0), vec![2, 3]);
    }

    #[test]
    fn product_classical_points() {
        let zz = product_observable(&z_observable(), &z_observable());
        let cands: Vec<_> = stab_points().iter().flat_map(|a| stab_points().into_iter().map(move |b| a.kron(&b))).collect();
        let got = classical_points(&zz, &cands, 1e-9);
        assert_eq!(got, vec![0, 1, 6, 7]);
    }

    #[test]
    fn group_classification() {
        assert_eq!(AbelianGroup::classify(&[1, 2, 4, 4]), Some(AbelianGroup::new(&[4])));
        assert_eq!(AbelianGroup::classify(&[1, 2, 2, 2]), Some(AbelianGroup::new(&[2, 2])));
        assert_eq!(AbelianGroup::all_of_order(16).len(), 5);
        assert_eq!(AbelianGroup::new(&[2, 3]).canonical(), AbelianGroup::new(&[6]));
        assert_eq!(AbelianGroup::new(&[4, 2]).canonical().to_string(), "Z2×Z4");
        assert_eq!(AbelianGroup::new(&[2, 2]).exponent(), 2);
    }

    #[test]
    fn stab_phase_group_is_z4() {
        let g = phase_group(&z_observable(), &stab_points(), EqualityMode::UpToScalar(1e-9)).unwrap();
        assert_eq!(g.candidates, vec![2, 3, 4, 5]);
        assert_eq!(g.order_multiset(), vec![1, 2, 4, 4]);
        assert_eq!(g.class, Some(AbelianGroup::new(&[4])));
    }

    #[test]
    fn spek_phase_group_is_klein() {
        let g = phase_group(&spek_pair().white, &spek_points(), EqualityMode::Exact).unwrap();
        assert_eq!(g.candidates, vec![2, 3, 4, 5]);
        assert_eq!(g.class, Some(AbelianGroup::new(&[2, 2])));
    }

    #[test]
    fn incomplete_candidates() {
        let pts = stab_points();
        let partial = vec![pts[2].clone(), pts[4].clone()];
        let err = phase_group(&z_observable(), &partial, EqualityMode::UpToScalar(1e-9)).unwrap_err();
        assert!(matches!(err, AlgebraError::IncompleteCandidates(_, _)));
    }

    #[test]
    fn circle_group() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let r = circle_phase_check(&z_observable(), 100, &mut rng, mode());
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn zx_pair_laws() {
        let p = zx_pair();
        let coh = check_coherence(&p, mode());
        assert!(coh.all_pass(), "{coh}");
        let s = coh.line("scalar-cancellable").unwrap().scalar.unwrap();
        assert!((s - C64::new(2f64.sqrt(), 0.0)).norm() < 1e-9);
        assert!(check_complementarity(&p, mode()).all_pass());
        let sc = check_strong_complementarity(&p, mode());
        assert!(sc.all_pass(), "{sc}");
        assert!(sc.passes("implies-hopf"));
        assert!(check_exponent_law(&p, 2, mode()).all_pass());
    }

    #[test]
    fn z_with_itself_fails_hopf() {
        let p = ObservablePair::new("Z/Z", z_observable(), z_observable());
        assert!(!check_complementarity(&p, mode()).passes("hopf"));
    }

    #[test]
    fn frel_pair_is_complementary_exactly() {
        let p = frel_pair();
        let r = check_complementarity(&p, LawMode { tol: 0.0, strict: true });
        assert!(r.all_pass(), "{r}");
        assert!(check_strong_complementarity(&p, mode()).all_pass());
    }

    #[test]
    fn spek_pair_is_coherent() {
        assert!(check_coherence(&spek_pair(), mode()).all_pass());
    }

    #[test]
    fn rotated_x_is_not_coherent() {
        let w = C64::from_polar(1.0, 0.7);
        let xb: Vec<_> = x_basis().into_iter().enumerate().map(|(i, v)| if i == 0 { v.scale(w) } else { v }).collect();
        let p = ObservablePair::new("Z/X'", z_observable(), Observable::from_basis("X'", xb));
        let r = check_coherence(&p, mode());
        assert!(r.passes("white-unit-gray-classical"));
        assert!(!r.passes("gray-unit-white-classical"));
    }

    #[test]
    fn coherify_is_idempotent() {
        let z: Vec<_> = (0..2).map(|i| Matrix::basis(2, i)).collect();
        let p = coherify(&z, &x_basis(), 1e-9).unwrap();
        for (a, b) in p.gray.basis().unwrap().iter().zip(x_basis()) {
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
        let zy = coherify(&z, &y_basis(), 1e-9).unwrap();
        assert!(check_coherence(&zy, mode()).all_pass());
        let again = coherify(zy.white.basis().unwrap(), zy.gray.basis().unwrap(), 1e-9).unwrap();
        for (a, b) in again.gray.basis().unwrap().iter().zip(zy.gray.basis().unwrap()) {
            assert!(a.max_abs_diff(b) < 1e-12);
        }
        assert!(matches!(coherify(&z, &z, 1e-9), Err(AlgebraError::NotUnbiased(_))));
    }

    #[test]
    fn group_algebra_pairs_are_sc() {
        for m in [vec![2], vec![3], vec![4], vec![2, 2]] {
            let g = AbelianGroup::new(&m);
            let p = group_algebra_pair(&g);
            let r = check_strong_complementarity(&p, mode());
            assert!(r.all_pass(), "{g}: {r}");
            let k = gray_classical_group(&p, EqualityMode::Tolerance(1e-9)).unwrap();
            assert!(k.matches_group(&g), "{g}");
            assert!(check_exponent_law(&p, g.exponent() as usize, mode()).all_pass());
            assert!(check_exponent_law(&p, g.order(), mode()).all_pass());
        }
    }

    #[test]
    fn exponent_law_needs_the_exponent() {
        let p = group_algebra_pair(&AbelianGroup::new(&[3]));
        assert!(check_exponent_law(&p, 3, mode()).all_pass());
        assert!(!check_exponent_law(&p, 2, mode()).all_pass());
    }

    #[test]
    fn z2_antipode_is_identity() {
        let p = group_algebra_pair(&AbelianGroup::new(&[2]));
        assert!(p.antipode().max_abs_diff(&Matrix::identity(2)) < 1e-12);
    }

    #[test]
    fn f4_is_complementary_not_sc() {
        let p = f4_pair(0.3).unwrap();
        assert!(check_coherence(&p, mode()).all_pass());
        assert!(check_complementarity(&p, mode()).all_pass());
        assert!(!check_strong_complementarity(&p, mode()).all_pass());
        assert!(check_strong_complementarity(&f4_pair(0.0).unwrap(), mode()).all_pass());
    }

    #[test]
    fn sharpness() {
        let p = zx_pair();
        let r = check_sharpness(&p, &x_basis(), mode());
        assert!(r.all_pass(), "{r}");
        assert!(r.passes("implies-bialgebra"));
        let g = group_algebra_pair(&AbelianGroup::new(&[3]));
        let pts = g.gray.basis().unwrap().to_vec();
        assert!(check_sharpness(&g, &pts, mode()).all_pass());
        let f = f4_pair(0.3).unwrap();
        let pts = f.gray.basis().unwrap().to_vec();
        assert!(!check_sharpness(&f, &pts, mode()).passes("sharp"));
        let w = C64::from_polar(1.0, 0.7);
        let xb: Vec<_> = x_basis().into_iter().enumerate().map(|(i, v)| if i == 0 { v.scale(w) } else { v }).collect();
        let bad = ObservablePair::new("Z/X'", z_observable(), Observable::from_basis("X'", xb.clone()));
        let r = check_sharpness(&bad, &xb, mode());
        assert!(!r.passes("precondition-coherent"));
    }

    #[test]
    fn enough_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        assert!(enough_classical_points_complex(&z_observable(), &stab_points(), &mut rng, 1e-9));
        // Dual numbers: only |0> is classical.
        let mut mu = Matrix::<C64>::zeros(2, 4);
        mu.set(0, 0, C64::new(1.0, 0.0));
        mu.set(1, 1, C64::new(1.0, 0.0));
        mu.set(1, 2, C64::new(1.0, 0.0));
        let dual = Observable::new("dual", mu, Matrix::basis(2, 0));
        assert_eq!(classical_points(&dual, &stab_points(), 1e-9), vec![0]);
        assert!(!enough_classical_points_complex(&dual, &stab_points(), &mut rng, 1e-9));
        assert!(enough_classical_points_relational(&Observable::<bool>::standard("w", 3)));
    }

    #[test]
    fn max_two() {
        let x = zx_pair();
        let third = crate::models::fixtures::y_observable();
        let r = max_two_check(&[x.white.clone(), x.gray.clone(), third], mode());
        assert!(r.contradiction(), "{r}");
        assert_eq!(r.witness.as_ref().unwrap().forced_rank, 1);
        assert!(r.premises.iter().any(|(_, ok)| !ok));
        let two = max_two_check(&[x.white.clone(), x.gray.clone()], mode());
        assert!(!two.contradiction());
        assert!(two.premises.iter().all(|(_, ok)| *ok));
        let one = Observable::<C64>::standard("one", 1);
        assert!(!max_two_check(&[one.clone(), one.clone(), one], mode()).contradiction());
    }
}
