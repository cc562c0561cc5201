//! GHZ correlations, parities, local hidden variables and the Mermin argument.
//!
//! Outcomes of the gray measurement are labelled by their position in the gray basis,
//! read as elements of `Z_D`; the joint outcome `(k_1, …, k_n)` is indexed with the
//! first system most significant.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::algebra::{check_exponent_law, classical_points, phase_group, AbelianGroup, AlgebraError, LawMode, ObservablePair};
use crate::cpm::{BornVector, CpmError};
use crate::diagram::{Diagram, DiagramError, NodeId, Phase, SystemType};
use crate::models::{fmt_sig, Compare, EqualityMode, Matrix, Model, ModelError};
use crate::rewrite::{collapse_bipartite, Fragment, RewriteError};
use crate::signatures::Signature;
use crate::C64;

/// Most systems the hidden-variable search will enumerate.
pub const MAX_SYSTEMS: usize = 3;
/// Most settings per system the hidden-variable search will enumerate.
pub const MAX_SETTINGS: usize = 3;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum NonlocalityError {
    #[error("expected {expected} angles, got {found}")]
    AngleCount { expected: usize, found: usize },
    #[error("need at least two parties")]
    TooFewParties,
    #[error("search over {0} systems and {1} settings exceeds the enumeration guard")]
    TooLarge(usize, usize),
    #[error("phase {0} is not interpreted")]
    Phase(String),
    #[error("observable has no basis")]
    NoBasis,
    #[error("distribution does not sum to a positive number")]
    Degenerate,
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cpm(#[from] CpmError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type NonlocalityResult<T> = Result<T, NonlocalityError>;

/// The `n`-legged state spider of `colour`.
pub fn ghz_state(sig: &Signature, colour: &str, n: usize) -> Diagram {
    sig.spider(colour, 0, n, Phase::Zero)
}

fn wire() -> SystemType {
    SystemType::self_dual("Q")
}

/// The doubled GHZ experiment before simplification: white points carrying `+Σα` and
/// `-Σα` (the conjugate and plain copies of the rotated GHZ state) feed two white
/// copies, and the `n` gray merges pair the legs, one per measured system.
pub fn correlation_diagram(angles: &[Phase]) -> NonlocalityResult<Diagram> {
    let n = angles.len();
    let q = wire();
    let mut total = Phase::Zero;
    for a in angles {
        total = total.add(a).map_err(|e| NonlocalityError::Phase(e.to_string()))?;
    }
    let point = |p: Phase| Diagram::spider("white", &q, 0, 1, p);
    let copy = || Diagram::spider("white", &q, 1, n, Phase::Zero);
    let conj = point(total.clone()).compose(&copy())?;
    let plain = point(total.neg()).compose(&copy())?;
    let both = conj.tensor(&plain);
    // Leg k of the conjugate copy meets leg k of the plain copy.
    let perm: Vec<usize> = (0..2 * n).map(|i| if i < n { 2 * i } else { 2 * (i - n) + 1 }).collect();
    let mut merges = Diagram::empty();
    for _ in 0..n {
        merges = merges.tensor(&Diagram::spider("gray", &q, 2, 1, Phase::Zero));
    }
    Ok(both.compose(&Diagram::permutation(&vec![q; 2 * n], &perm)?)?.compose(&merges)?)
}

/// Collapses the copy/merge region of [`correlation_diagram`] to a single gray merge
/// followed by a white copy.
pub fn simplified_correlation_diagram(angles: &[Phase]) -> NonlocalityResult<Diagram> {
    let d = correlation_diagram(angles)?;
    let region: BTreeSet<NodeId> = d
        .nodes()
        .iter()
        .filter(|(_, node)| node.is_spider_of("gray") || (node.is_spider_of("white") && node.inputs.len() == 1))
        .map(|(&id, _)| id)
        .collect();
    Ok(collapse_bipartite(&d, &region, &Fragment::default())?)
}

fn pair_model(pair: &ObservablePair<C64>) -> Model<C64> {
    Model::new(pair.name.clone()).with_dim("Q", pair.dim()).with_colour("white", pair.white.clone()).with_colour("gray", pair.gray.clone())
}

fn normalise(observable: &str, raw: Vec<f64>) -> NonlocalityResult<BornVector> {
    let s: f64 = raw.iter().sum();
    if s <= 0.0 || !s.is_finite() {
        return Err(NonlocalityError::Degenerate);
    }
    Ok(BornVector::new(observable, raw.into_iter().map(|p| p / s).collect())?)
}

/// Reads joint gray-basis coefficients `⟨x_{k_1}| ⊗ … ⊗ ⟨x_{k_n}| v`.
fn gray_coefficients(pair: &ObservablePair<C64>, v: &Matrix<C64>, n: usize) -> NonlocalityResult<Vec<C64>> {
    let basis = pair.gray.basis().ok_or(NonlocalityError::NoBasis)?;
    let d = pair.dim();
    let total = d.pow(n as u32);
    Ok((0..total)
        .map(|idx| {
            let effects: Vec<Matrix<C64>> = digits(idx, d, n).iter().map(|&k| basis[k].dagger()).collect();
            Matrix::kron_all(&effects).compose(v).get(0, 0)
        })
        .collect())
}

fn digits(mut idx: usize, base: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = idx % base;
        idx /= base;
    }
    out
}

/// Joint outcome distribution of the phased gray measurements `m^{α_1} ⊗ … ⊗ m^{α_n}`
/// on the white GHZ state, computed by collapsing the doubled diagram and evaluating it.
pub fn ghz_correlations(pair: &ObservablePair<C64>, angles: &[Phase]) -> NonlocalityResult<BornVector> {
    if angles.len() < 2 {
        return Err(NonlocalityError::TooFewParties);
    }
    let d = simplified_correlation_diagram(angles)?;
    let v = pair_model(pair).interpret(&d)?;
    let raw = gray_coefficients(pair, &v, angles.len())?;
    normalise(&pair.gray.name, raw.into_iter().map(|c| c.re).collect())
}

/// The same distribution by the Born rule: rotate `Σ_i |w_i…w_i⟩` by `Λ_white(-α_k)` on
/// each system and take `|⟨x_{k_1}…x_{k_n}|ψ⟩|²`.
pub fn ghz_born_oracle(pair: &ObservablePair<C64>, angles: &[Phase]) -> NonlocalityResult<BornVector> {
    let n = angles.len();
    if n < 2 {
        return Err(NonlocalityError::TooFewParties);
    }
    let white = pair.white.basis().ok_or(NonlocalityError::NoBasis)?;
    let mut psi = Matrix::zeros(pair.dim().pow(n as u32), 1);
    for w in white {
        psi = psi.add(&Matrix::kron_all(&vec![w.clone(); n]));
    }
    let rotations: Vec<Matrix<C64>> = angles.iter().map(|a| crate::cpm::phase_rotation(&pair.white, &a.neg())).collect::<Result<_, _>>()?;
    let psi = Matrix::kron_all(&rotations).compose(&psi);
    let raw = gray_coefficients(pair, &psi, n)?;
    normalise(&pair.gray.name, raw.into_iter().map(|c| c.norm_sqr()).collect())
}

/// Pushforward of a joint distribution over `G^n` along the group sum.
pub fn parity(b: &BornVector, g: &AbelianGroup, n: usize) -> Vec<f64> {
    let order = g.order();
    let mut out = vec![0.0; order];
    for (idx, p) in b.probs.iter().enumerate() {
        let sum = digits(idx, order, n).iter().fold(g.element(0), |acc, &k| g.add(&acc, &g.element(k)));
        out[g.index(&sum)] += p;
    }
    out
}

/// Group elements with nonzero weight.
pub fn support(dist: &[f64], tol: f64) -> Vec<u32> {
    dist.iter().enumerate().filter(|(_, p)| **p > tol).map(|(i, _)| i as u32).collect()
}

/// Outcome per system per setting.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HiddenState {
    pub outcomes: Vec<Vec<u32>>,
}

impl HiddenState {
    pub fn parity(&self, settings: &[usize], modulus: u32) -> u32 {
        settings.iter().enumerate().map(|(sys, &s)| self.outcomes[sys][s]).sum::<u32>() % modulus
    }
}

impl fmt::Display for HiddenState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.outcomes.iter().map(|o| o.iter().map(u32::to_string).collect::<Vec<_>>().join("")).collect();
        write!(f, "{}", parts.join("|"))
    }
}

/// A joint setting (one label per system) and the parities it may show.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityConstraint {
    pub settings: Vec<usize>,
    pub allowed: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LhvReport {
    pub systems: usize,
    pub settings: usize,
    pub examined: usize,
    pub satisfying: Vec<HiddenState>,
}

impl LhvReport {
    pub fn feasible(&self) -> bool {
        !self.satisfying.is_empty()
    }
}

impl fmt::Display for LhvReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "hidden states examined={} satisfying={}", self.examined, self.satisfying.len())?;
        if let Some(w) = self.satisfying.first() {
            write!(f, " witness={w}")?;
        }
        Ok(())
    }
}

/// Enumerates every deterministic assignment of `Z_modulus` outcomes to each
/// (system, setting) and keeps those whose parities lie in every constraint's allowed set.
pub fn lhv_search(systems: usize, settings: usize, modulus: u32, constraints: &[ParityConstraint]) -> NonlocalityResult<LhvReport> {
    if systems > MAX_SYSTEMS || settings > MAX_SETTINGS {
        return Err(NonlocalityError::TooLarge(systems, settings));
    }
    let cells = systems * settings;
    let total = (modulus as usize).pow(cells as u32);
    let mut satisfying = Vec::new();
    for idx in 0..total {
        let flat = digits(idx, modulus as usize, cells);
        let state = HiddenState { outcomes: flat.chunks(settings).map(|c| c.iter().map(|&x| x as u32).collect()).collect() };
        if constraints.iter().all(|c| c.allowed.contains(&state.parity(&c.settings, modulus))) {
            satisfying.push(state);
        }
    }
    Ok(LhvReport { systems, settings, examined: total, satisfying })
}

/// Settings of the Mermin experiment: `X` is label 0, `Y` label 1.
pub fn mermin_settings() -> Vec<(String, Vec<usize>)> {
    [("XXX", [0, 0, 0]), ("XYY", [0, 1, 1]), ("YXY", [1, 0, 1]), ("YYX", [1, 1, 0])].iter().map(|(n, s)| (n.to_string(), s.to_vec())).collect()
}

/// One Mermin setting evaluated two ways.
#[derive(Clone, Debug, PartialEq)]
pub struct SettingResult {
    pub label: String,
    pub diagrammatic: BornVector,
    pub oracle: BornVector,
    pub parity: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MerminReport {
    pub settings: Vec<SettingResult>,
    /// Largest disagreement between the two computations.
    pub agreement: f64,
    pub parities: Vec<Option<u32>>,
    pub lhv: LhvReport,
    /// Order-two law `μ_white ∘ δ_gray ∝ η_white ∘ ε_gray` used to cancel the doubled
    /// `Y` phases.
    pub exponent_two: bool,
}

impl MerminReport {
    /// Quantum parities are definite and no hidden state reproduces them.
    pub fn contradiction(&self) -> bool {
        self.parities.iter().all(Option::is_some) && !self.lhv.feasible()
    }
}

impl fmt::Display for MerminReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, p) in self.settings.iter().zip(&self.parities) {
            let par = match p {
                Some(0) => "even".to_string(),
                Some(1) => "odd".to_string(),
                Some(k) => k.to_string(),
                None => "mixed".to_string(),
            };
            writeln!(f, "{} parity={par} support={}", s.label, s.diagrammatic)?;
        }
        writeln!(f, "agreement={}", fmt_sig(self.agreement, 12))?;
        writeln!(f, "exponent-2 law {}", if self.exponent_two { "holds" } else { "fails" })?;
        writeln!(f, "{}", self.lhv)?;
        let reasoning = "a hidden state copies one outcome per system and setting into all four settings; \
            the three odd settings then sum to XXX plus twice every Y outcome, which is even, \
            while XXX is even and the three odd parities sum to odd";
        if self.contradiction() {
            writeln!(f, "contradiction: {reasoning}")
        } else {
            writeln!(f, "no contradiction")
        }
    }
}

/// The qubit GHZ/Mermin argument: parities from the diagram pipeline, checked against
/// the Born rule, then an exhaustive hidden-state search.
pub fn mermin_report(pair: &ObservablePair<C64>, x: &Phase, y: &Phase) -> NonlocalityResult<MerminReport> {
    let g = AbelianGroup::new(&[pair.dim() as u32]);
    let mut settings = Vec::new();
    let mut parities = Vec::new();
    let mut constraints = Vec::new();
    let mut agreement: f64 = 0.0;
    for (label, s) in mermin_settings() {
        let angles: Vec<Phase> = s.iter().map(|&k| if k == 0 { x.clone() } else { y.clone() }).collect();
        let diagrammatic = ghz_correlations(pair, &angles)?;
        let oracle = ghz_born_oracle(pair, &angles)?;
        agreement = agreement.max(diagrammatic.max_diff(&oracle));
        let par = parity(&diagrammatic, &g, 3);
        let allowed = support(&par, 1e-9);
        parities.push(if allowed.len() == 1 { Some(allowed[0]) } else { None });
        constraints.push(ParityConstraint { settings: s, allowed });
        settings.push(SettingResult { label, diagrammatic, oracle, parity: par });
    }
    let lhv = lhv_search(3, 2, g.order() as u32, &constraints)?;
    let exponent_two = check_exponent_law(pair, 2, LawMode::default()).all_pass();
    Ok(MerminReport { settings, agreement, parities, lhv, exponent_two })
}

/// Mermin parities predicted from a phase group alone: the `X` setting carries the unit
/// phase, `Y` the first phase that is neither the unit nor a gray classical point, and a
/// setting's parity is 0 or 1 when its phase sum is the unit or another gray classical
/// point. Works for relational models as well as complex ones.
pub fn phase_group_parities<S: Compare>(pair: &ObservablePair<S>, candidates: &[Matrix<S>], mode: EqualityMode) -> NonlocalityResult<Vec<(String, Option<u32>)>> {
    let pg = phase_group(&pair.white, candidates, mode)?;
    let tol = match mode {
        EqualityMode::Exact => 0.0,
        EqualityMode::Tolerance(t) | EqualityMode::UpToScalar(t) => t,
    };
    let gray_pts: BTreeSet<usize> = classical_points_scaled(pair, candidates, tol);
    let is_gray = |e: usize| gray_pts.contains(&pg.candidates[e]);
    let y = (0..pg.order()).find(|&e| e != pg.identity && !is_gray(e)).ok_or_else(|| NonlocalityError::Phase("no unbiased non-classical phase".into()))?;
    let out = mermin_settings()
        .into_iter()
        .map(|(label, s)| {
            let sum = s.iter().fold(pg.identity, |acc, &k| pg.table[acc][if k == 0 { pg.identity } else { y }]);
            let p = if sum == pg.identity {
                Some(0)
            } else if is_gray(sum) {
                Some(1)
            } else {
                None
            };
            (label, p)
        })
        .collect();
    Ok(out)
}

/// Candidate positions that are gray classical points up to a nonzero scalar.
fn classical_points_scaled<S: Compare>(pair: &ObservablePair<S>, candidates: &[Matrix<S>], tol: f64) -> BTreeSet<usize> {
    if !S::NUMERIC {
        return classical_points(&pair.gray, candidates, tol).into_iter().collect();
    }
    // Complex candidates are normalised; classical points are not, so compare directions.
    let (delta, eps) = (pair.gray.delta(), pair.gray.epsilon());
    (0..candidates.len())
        .filter(|&i| {
            let k = &candidates[i];
            let copied = delta.compose(k);
            let twice = k.kron(k);
            let c = S::compare_with(&copied, &twice, EqualityMode::UpToScalar(tol.max(1e-9)));
            c.equal && !eps.compose(k).is_zero()
        })
        .collect()
}
