//! Mixed states: doubling of pure maps, Kraus maps, measurements, Born vectors,
//! preparations and decoherence.
//!
//! Density matrices travel as names `Σ_i |i⟩ ⊗ ρ|i⟩`, so a pure map `B` acts on them as
//! `B̄ ⊗ B`. A completely positive map is `Σ_k B̄_k ⊗ B_k`, the doubled form of
//! `Σ_k |k⟩ ⊗ B_k` with the ancilla closed off by a cap.

use std::fmt;

use thiserror::Error;

use crate::algebra::{check_coherence, LawMode, ObservablePair};
use crate::diagram::{Diagram, DiagramError, Phase};
use crate::models::{fmt_sig, Matrix, Model, ModelError, Observable};
use crate::C64;

/// Tolerance for Born-vector validity.
pub const BORN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CpmError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("state has trace {0}, not 1")]
    NotNormalized(f64),
    #[error("not a Born vector: {0}")]
    InvalidBorn(String),
    #[error("observable {0} has no basis")]
    NoBasis(String),
    #[error("pair {0} is not coherent")]
    NotCoherent(String),
    #[error("phase {0} is not interpreted")]
    Phase(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

pub type CpmResult<T> = Result<T, CpmError>;

/// The name of a square matrix: `Σ_i |i⟩ ⊗ ρ|i⟩`.
pub fn name(rho: &Matrix<C64>) -> Matrix<C64> {
    let d = rho.rows();
    assert_eq!(rho.cols(), d, "names are taken of square matrices");
    Matrix::from_fn(d * d, 1, |r, _| rho.get(r % d, r / d))
}

/// Inverse of [`name`].
pub fn unname(v: &Matrix<C64>) -> Matrix<C64> {
    let d = (v.rows() as f64).sqrt().round() as usize;
    assert_eq!(d * d, v.rows(), "name length must be a square");
    Matrix::from_fn(d, d, |r, c| v.get(c * d + r, 0))
}

/// `|ψ⟩⟨ψ|`.
pub fn projector(psi: &Matrix<C64>) -> Matrix<C64> {
    psi.compose(&psi.dagger())
}

/// A completely positive map on names, `D_in² -> D_out²`.
#[derive(Clone, Debug, PartialEq)]
pub struct CpmMap {
    pub input: usize,
    pub output: usize,
    pub superop: Matrix<C64>,
}

impl CpmMap {
    pub fn identity(d: usize) -> CpmMap {
        CpmMap { input: d, output: d, superop: Matrix::identity(d * d) }
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &CpmMap) -> CpmResult<CpmMap> {
        if self.output != next.input {
            return Err(CpmError::Shape(format!("{} then {}", self.output, next.input)));
        }
        Ok(CpmMap { input: self.input, output: next.output, superop: next.superop.compose(&self.superop) })
    }

    /// Applies the map to a density matrix.
    pub fn apply(&self, rho: &Matrix<C64>) -> CpmResult<Matrix<C64>> {
        if rho.shape() != (self.input, self.input) {
            return Err(CpmError::Shape(format!("state is {}x{}, map expects {}", rho.rows(), rho.cols(), self.input)));
        }
        Ok(unname(&self.superop.compose(&name(rho))))
    }
}

/// `B̄ ⊗ B`, acting as `ρ ↦ BρB†`.
pub fn double(b: &Matrix<C64>) -> CpmMap {
    CpmMap { input: b.cols(), output: b.rows(), superop: b.conj().kron(b) }
}

/// `ρ ↦ Σ_k B_k ρ B_k†`.
pub fn kraus_cpm(maps: &[Matrix<C64>]) -> CpmResult<CpmMap> {
    let first = maps.first().ok_or_else(|| CpmError::Shape("no Kraus maps".into()))?;
    let shape = first.shape();
    let mut total = Matrix::zeros(shape.0 * shape.0, shape.1 * shape.1);
    for b in maps {
        if b.shape() != shape {
            return Err(CpmError::Shape(format!("Kraus maps {shape:?} and {:?}", b.shape())));
        }
        total = total.add(&b.conj().kron(b));
    }
    Ok(CpmMap { input: shape.1, output: shape.0, superop: total })
}

/// `Σ_k |k⟩ ⊗ B_k`, the single pure map whose doubling with a capped ancilla gives
/// [`kraus_cpm`].
pub fn kraus_pack(maps: &[Matrix<C64>]) -> CpmResult<Matrix<C64>> {
    let first = maps.first().ok_or_else(|| CpmError::Shape("no Kraus maps".into()))?;
    let n = maps.len();
    let mut packed = Matrix::zeros(n * first.rows(), first.cols());
    for (k, b) in maps.iter().enumerate() {
        if b.shape() != first.shape() {
            return Err(CpmError::Shape("Kraus maps differ in shape".into()));
        }
        packed = packed.add(&Matrix::basis(n, k).kron(b));
    }
    Ok(packed)
}

/// Doubles a packed map `A -> C ⊗ B`, contracting the two copies of `C` with the
/// standard cap.
pub fn double_with_ancilla(packed: &Matrix<C64>, ancilla: usize) -> CpmResult<CpmMap> {
    if ancilla == 0 || !packed.rows().is_multiple_of(ancilla) {
        return Err(CpmError::Shape(format!("{} rows do not split over ancilla {ancilla}", packed.rows())));
    }
    let out = packed.rows() / ancilla;
    let a = packed.cols();
    let full = packed.conj().kron(packed);
    // Rows of `full` are (c, b, c', b'); keep c == c'.
    let superop = Matrix::from_fn(out * out, a * a, |r, col| {
        let (b, b2) = (r / out, r % out);
        (0..ancilla).map(|c| full.get(((c * out + b) * ancilla + c) * out + b2, col)).sum()
    });
    Ok(CpmMap { input: a, output: out, superop })
}

/// A mixed-state process drawn as a pure diagram `A -> C ⊗ B`, whose first
/// `ancilla` outputs are discarded.
#[derive(Clone, Debug, PartialEq)]
pub struct CpmDiagram {
    pub base: Diagram,
    pub ancilla: usize,
}

impl CpmDiagram {
    pub fn pure(d: Diagram) -> CpmDiagram {
        CpmDiagram { base: d, ancilla: 0 }
    }

    /// `conj(base) ⊗ base` with the two ancilla copies joined by caps. The conjugate
    /// copy keeps the wire order of the original.
    pub fn doubled(&self) -> CpmResult<Diagram> {
        let base = &self.base;
        let (n_out, a) = (base.outputs().len(), self.ancilla);
        if a > n_out {
            return Err(CpmError::Shape(format!("ancilla {a} exceeds {n_out} outputs")));
        }
        let conj = base.conjugate_lower()?;
        let conj = reversal(conj.inputs())?.compose(&conj)?;
        let conj = conj.compose(&reversal(conj.outputs())?)?;
        let both = conj.tensor(base);
        // Pair each ancilla wire with its conjugate, then the kept conjugate and pure wires.
        let perm: Vec<usize> = (0..2 * n_out)
            .map(|i| match (i < n_out, i % n_out) {
                (true, k) if k < a => 2 * k,
                (false, k) if k < a => 2 * k + 1,
                (true, k) => a + k,
                (false, k) => n_out + k,
            })
            .collect();
        let sorted = both.compose(&Diagram::permutation(both.outputs(), &perm)?)?;
        let mut closing = Diagram::empty();
        for k in 0..a {
            closing = closing.tensor(&Diagram::cap(&conj.outputs()[k])?);
        }
        let kept: Vec<_> = sorted.outputs()[2 * a..].to_vec();
        Ok(sorted.compose(&closing.tensor(&Diagram::identity(&kept)))?)
    }

    /// Evaluates the doubled diagram; the result acts on names.
    pub fn evaluate(&self, model: &Model<C64>) -> CpmResult<CpmMap> {
        let d = self.doubled()?;
        let m = model.interpret(&d)?;
        let dim = |ts: &[crate::diagram::SystemType]| -> CpmResult<usize> {
            let mut p = 1;
            for t in ts {
                p *= model.dim(t)?;
            }
            Ok(p)
        };
        Ok(CpmMap { input: dim(self.base.inputs())?, output: dim(&self.base.outputs()[self.ancilla..])?, superop: m })
    }
}

fn reversal(types: &[crate::diagram::SystemType]) -> CpmResult<Diagram> {
    let n = types.len();
    Ok(Diagram::permutation(types, &(0..n).rev().collect::<Vec<_>>())?)
}

/// Probability distribution over an observable's classical points.
#[derive(Clone, Debug, PartialEq)]
pub struct BornVector {
    pub observable: String,
    pub probs: Vec<f64>,
}

impl BornVector {
    /// Checks nonnegativity and normalisation within [`BORN_TOL`].
    pub fn new(observable: impl Into<String>, probs: Vec<f64>) -> CpmResult<BornVector> {
        if let Some(p) = probs.iter().find(|p| **p < -BORN_TOL || !p.is_finite()) {
            return Err(CpmError::InvalidBorn(format!("entry {p}")));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > BORN_TOL {
            return Err(CpmError::InvalidBorn(format!("entries sum to {s}")));
        }
        Ok(BornVector { observable: observable.into(), probs })
    }

    pub fn max_diff(&self, other: &BornVector) -> f64 {
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl fmt::Display for BornVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.probs.iter().enumerate().map(|(i, p)| format!("{i}:{}", fmt_sig(*p, 12))).collect();
        write!(f, "{}[{}]", self.observable, parts.join(" "))
    }
}

fn basis_of(obs: &Observable<C64>) -> CpmResult<&[Matrix<C64>]> {
    obs.basis().ok_or_else(|| CpmError::NoBasis(obs.name.clone()))
}

/// The measurement map from names to classical outcome vectors: row `k` is the doubled
/// effect `⟨x_k|`.
pub fn measurement(obs: &Observable<C64>) -> CpmResult<Matrix<C64>> {
    let basis = basis_of(obs)?;
    let d = obs.dim();
    Ok(Matrix::from_fn(d, d * d, |k, col| {
        let x = &basis[k];
        x.get(col / d, 0) * x.get(col % d, 0).conj()
    }))
}

/// Born-rule statistics `Tr(|x_k⟩⟨x_k| ρ)`.
pub fn measure(obs: &Observable<C64>, rho: &Matrix<C64>) -> CpmResult<BornVector> {
    let d = obs.dim();
    if rho.shape() != (d, d) {
        return Err(CpmError::Shape(format!("state is {}x{}, observable has dimension {d}", rho.rows(), rho.cols())));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > BORN_TOL || tr.im.abs() > BORN_TOL {
        return Err(CpmError::NotNormalized(tr.re));
    }
    let v = measurement(obs)?.compose(&name(rho));
    BornVector::new(obs.name.clone(), (0..d).map(|k| v.get(k, 0).re).collect())
}

/// `Σ_k p_k |x_k⟩⟨x_k|`, the adjoint of [`measurement`] applied to `b`.
pub fn prepare(obs: &Observable<C64>, b: &BornVector) -> CpmResult<Matrix<C64>> {
    if b.probs.len() != obs.dim() {
        return Err(CpmError::InvalidBorn(format!("{} entries for dimension {}", b.probs.len(), obs.dim())));
    }
    BornVector::new(b.observable.clone(), b.probs.clone())?;
    let p = Matrix::column(b.probs.iter().map(|&x| C64::new(x, 0.0)).collect());
    Ok(unname(&measurement(obs)?.dagger().compose(&p)))
}

/// A pure state `Σ_k √p_k |x_k⟩` whose measurement reproduces `b`.
pub fn born_witness_state(obs: &Observable<C64>, b: &BornVector) -> CpmResult<Matrix<C64>> {
    let basis = basis_of(obs)?;
    let mut psi = Matrix::zeros(obs.dim(), 1);
    for (x, p) in basis.iter().zip(&b.probs) {
        psi = psi.add(&x.scale(C64::new(p.max(0.0).sqrt(), 0.0)));
    }
    Ok(psi)
}

/// `prepare ∘ measure`: kills off-diagonal terms in the observable's basis.
pub fn decoherence(obs: &Observable<C64>) -> CpmResult<CpmMap> {
    let m = measurement(obs)?;
    let d = obs.dim();
    Ok(CpmMap { input: d, output: d, superop: m.dagger().compose(&m) })
}

/// Measures in the gray basis after rotating by `Λ_white(-α)`. For the qubit Z/X pair,
/// `α = 0` is an X measurement and `α = π/2` a Y measurement.
pub fn phased_measurement(pair: &ObservablePair<C64>, alpha: &Phase, rho: &Matrix<C64>) -> CpmResult<BornVector> {
    if !check_coherence(pair, LawMode::default()).all_pass() {
        return Err(CpmError::NotCoherent(pair.name.clone()));
    }
    let u = phase_rotation(&pair.white, &alpha.neg())?;
    let rotated = double(&u).apply(rho)?;
    measure(&pair.gray, &rotated)
}

/// `Λ(α)` normalised so that the unit phase gives the identity.
pub fn phase_rotation(obs: &Observable<C64>, alpha: &Phase) -> CpmResult<Matrix<C64>> {
    let p = obs.phase_point(alpha).ok_or_else(|| CpmError::Phase(alpha.to_string()))?;
    let lam = obs.phase_action(&p);
    let unit = obs.phase_action(obs.eta());
    // Λ(η) is the identity for a special Frobenius algebra; divide out any scale.
    let s = unit.get(0, 0);
    Ok(lam.scale(C64::new(1.0, 0.0) / s))
}
