//! Semantics: dense tensors, model bindings, functorial evaluation and soundness checks.

pub mod fixtures;
mod observable;
mod tensor;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::Rng;
use thiserror::Error;

pub use observable::Observable;
pub use tensor::{fmt_sig, Matrix, Scalar, Tensor};

use crate::diagram::{Diagram, DiagramError, NodeId, NodeKind, Phase, Source, SystemType, Target};
use crate::rewrite::Rule;

/// Default cap on the number of entries of any intermediate matrix.
pub const DEFAULT_DIM_CAP: usize = 1 << 20;

/// Default tolerance for complex comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ModelError {
    #[error("system '{0}' is not bound in the model")]
    UnboundSystem(String),
    #[error("generator '{0}' is not bound in the model")]
    UnboundGenerator(String),
    #[error("colour '{0}' is not bound in the model")]
    UnboundColour(String),
    #[error("phase {phase} is not interpreted by '{name}'")]
    UninterpretedPhase { name: String, phase: String },
    #[error("value of '{name}' has shape {found:?}, expected {expected:?}")]
    ShapeMismatch { name: String, expected: (usize, usize), found: (usize, usize) },
    #[error("evaluation needs {needed} entries, above the cap of {cap}")]
    DimensionOverflow { needed: usize, cap: usize },
    #[error("non-finite entry in the value of '{0}'")]
    NonFinite(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

pub type ModelResult<T> = Result<T, ModelError>;

type PhasedFn<S> = Arc<dyn Fn(f64) -> Matrix<S> + Send + Sync>;

/// Value assigned to a generator.
#[derive(Clone)]
pub enum BoxValue<S> {
    Fixed(Matrix<S>),
    /// Angle-parametrised family.
    Phased(PhasedFn<S>),
}

/// Monoidal functor data: a dimension per system, a matrix per generator and an
/// observable per spider colour. Cups are `Σ_i |i i>`.
#[derive(Clone)]
pub struct Model<S> {
    pub name: String,
    dims: BTreeMap<String, usize>,
    boxes: BTreeMap<String, BoxValue<S>>,
    colours: BTreeMap<String, Arc<Observable<S>>>,
    pub dim_cap: usize,
}

impl<S: Scalar> fmt::Debug for Model<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("name", &self.name)
            .field("dims", &self.dims)
            .field("boxes", &self.boxes.keys().collect::<Vec<_>>())
            .field("colours", &self.colours.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl<S: Scalar> Model<S> {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), dims: BTreeMap::new(), boxes: BTreeMap::new(), colours: BTreeMap::new(), dim_cap: DEFAULT_DIM_CAP }
    }

    pub fn with_dim(mut self, system: &str, dim: usize) -> Self {
        self.dims.insert(system.into(), dim);
        self
    }

    pub fn with_box(mut self, name: &str, value: Matrix<S>) -> Self {
        self.boxes.insert(name.into(), BoxValue::Fixed(value));
        self
    }

    pub fn with_phased_box(mut self, name: &str, f: impl Fn(f64) -> Matrix<S> + Send + Sync + 'static) -> Self {
        self.boxes.insert(name.into(), BoxValue::Phased(Arc::new(f)));
        self
    }

    pub fn with_colour(mut self, name: &str, obs: Observable<S>) -> Self {
        self.colours.insert(name.into(), Arc::new(obs));
        self
    }

    pub fn with_dim_cap(mut self, cap: usize) -> Self {
        self.dim_cap = cap;
        self
    }

    pub fn dim(&self, t: &SystemType) -> ModelResult<usize> {
        self.dims.get(t.name()).copied().ok_or_else(|| ModelError::UnboundSystem(t.name().into()))
    }

    pub fn colour(&self, name: &str) -> ModelResult<&Observable<S>> {
        self.colours.get(name).map(|o| o.as_ref()).ok_or_else(|| ModelError::UnboundColour(name.into()))
    }

    pub fn box_value(&self, name: &str, phase: Option<&Phase>) -> ModelResult<Matrix<S>> {
        match (self.boxes.get(name), phase) {
            (None, _) => Err(ModelError::UnboundGenerator(name.into())),
            (Some(BoxValue::Fixed(m)), _) => Ok(m.clone()),
            (Some(BoxValue::Phased(f)), p) => {
                let p = p.cloned().unwrap_or(Phase::Zero);
                let a = p.as_angle().ok_or_else(|| ModelError::UninterpretedPhase { name: name.into(), phase: p.to_string() })?;
                Ok(f(a))
            }
        }
    }

    fn node_value(&self, d: &Diagram, id: NodeId, cache: &mut HashMap<String, Matrix<S>>) -> ModelResult<Matrix<S>> {
        let node = d.node(id).unwrap();
        let dims = |ts: &[SystemType]| -> ModelResult<usize> { ts.iter().map(|t| self.dim(t)).product() };
        let expected = (dims(&node.outputs)?, dims(&node.inputs)?);
        let (label, value) = match &node.kind {
            NodeKind::Box { name, phase, .. } => (name.clone(), self.box_value(name, phase.as_ref())?),
            NodeKind::Spider { colour, phase } => {
                let key = format!("{colour}/{}/{}/{phase}", node.inputs.len(), node.outputs.len());
                if let Some(m) = cache.get(&key) {
                    return Ok(m.clone());
                }
                let obs = self.colour(colour)?;
                let m = obs
                    .spider(node.inputs.len(), node.outputs.len(), phase)
                    .ok_or_else(|| ModelError::UninterpretedPhase { name: colour.clone(), phase: phase.to_string() })?;
                cache.insert(key, m.clone());
                (colour.clone(), m)
            }
            NodeKind::Cup => ("cup".into(), cup_matrix(self.dim(&node.outputs[1])?)),
            NodeKind::Cap => ("cap".into(), cup_matrix(self.dim(&node.inputs[0])?).dagger()),
        };
        if value.shape() != expected {
            return Err(ModelError::ShapeMismatch { name: label, expected, found: value.shape() });
        }
        Ok(value)
    }

    /// Evaluates a diagram by sweeping its nodes in topological order.
    pub fn interpret(&self, d: &Diagram) -> ModelResult<Matrix<S>> {
        let order = d.topo_order().ok_or_else(|| DiagramError::Malformed("diagram contains a directed cycle".into()))?;
        self.interpret_in_order(d, &order)
    }

    /// Evaluates with a randomly chosen topological order; the result must not depend on it.
    pub fn interpret_shuffled(&self, d: &Diagram, rng: &mut impl Rng) -> ModelResult<Matrix<S>> {
        let order = d
            .topo_order_by(|ready| {
                let k = rng.gen_range(0..ready.len());
                *ready.iter().nth(k).unwrap()
            })
            .ok_or_else(|| DiagramError::Malformed("diagram contains a directed cycle".into()))?;
        self.interpret_in_order(d, &order)
    }

    fn interpret_in_order(&self, d: &Diagram, order: &[NodeId]) -> ModelResult<Matrix<S>> {
        let in_dims: Vec<usize> = d.inputs().iter().map(|t| self.dim(t)).collect::<ModelResult<_>>()?;
        let cols: usize = in_dims.iter().product();
        let mut frontier: Vec<(Source, usize)> = (0..d.inputs().len()).map(|i| (Source::Input(i), in_dims[i])).collect();
        if cols > self.dim_cap {
            return Err(ModelError::DimensionOverflow { needed: cols, cap: self.dim_cap });
        }
        let mut state = Matrix::<S>::identity(cols);
        let mut cache = HashMap::new();
        for &id in order {
            let node = d.node(id).unwrap();
            let value = self.node_value(d, id, &mut cache)?;
            let positions: Vec<usize> = (0..node.inputs.len())
                .map(|k| {
                    let s = d.source_of(Target::In(id, k)).expect("unconnected input port");
                    frontier.iter().position(|(f, _)| *f == s).expect("source not on frontier")
                })
                .collect();
            let out_dims: Vec<usize> = node.outputs.iter().map(|t| self.dim(t)).collect::<ModelResult<_>>()?;
            state = apply_at(&state, &frontier.iter().map(|f| f.1).collect::<Vec<_>>(), &positions, &value, &out_dims, self.dim_cap)?;
            let mut keep = vec![true; frontier.len()];
            for &p in &positions {
                keep[p] = false;
            }
            frontier = frontier.into_iter().zip(keep).filter(|(_, k)| *k).map(|(f, _)| f).collect();
            frontier.extend(out_dims.iter().enumerate().map(|(k, &dim)| (Source::Out(id, k), dim)));
        }
        let positions: Vec<usize> = (0..d.outputs().len())
            .map(|j| {
                let s = d.source_of(Target::Output(j)).expect("unconnected output");
                frontier.iter().position(|(f, _)| *f == s).expect("output source not on frontier")
            })
            .collect();
        let dims: Vec<usize> = frontier.iter().map(|f| f.1).collect();
        let total: usize = dims.iter().product();
        apply_at(&state, &dims, &positions, &Matrix::identity(total), &positions.iter().map(|&p| dims[p]).collect::<Vec<_>>(), self.dim_cap)
    }
}

/// `Σ_i |i i>` as a `d² x 1` column.
pub fn cup_matrix<S: Scalar>(d: usize) -> Matrix<S> {
    let mut m = Matrix::zeros(d * d, 1);
    for i in 0..d {
        m.set(i * d + i, 0, S::one());
    }
    m
}

/// Applies `value` to the frontier wires at `positions` (in order); the remaining wires
/// keep their order and the new outputs are appended.
fn apply_at<S: Scalar>(
    state: &Matrix<S>,
    dims: &[usize],
    positions: &[usize],
    value: &Matrix<S>,
    out_dims: &[usize],
    cap: usize,
) -> ModelResult<Matrix<S>> {
    let n = dims.len();
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let rest: Vec<usize> = (0..n).filter(|i| !positions.contains(i)).collect();
    let offsets = |idx: &[usize]| -> Vec<usize> {
        let mut offs = vec![0usize];
        for &i in idx {
            let mut next = Vec::with_capacity(offs.len() * dims[i]);
            for &o in &offs {
                for v in 0..dims[i] {
                    next.push(o + v * strides[i]);
                }
            }
            offs = next;
        }
        offs
    };
    let rest_offs = offsets(&rest);
    let in_offs = offsets(positions);
    let n_out: usize = out_dims.iter().product();
    let cols = state.cols();
    let rows = rest_offs.len() * n_out;
    if rows.saturating_mul(cols.max(1)) > cap {
        return Err(ModelError::DimensionOverflow { needed: rows.saturating_mul(cols), cap });
    }
    let mut out = Matrix::zeros(rows, cols);
    let data = state.data();
    for (r, &ro) in rest_offs.iter().enumerate() {
        for (i, &io) in in_offs.iter().enumerate() {
            let row = &data[(ro + io) * cols..(ro + io + 1) * cols];
            if row.iter().all(|x| x.is_zero()) {
                continue;
            }
            for o in 0..n_out {
                let v = value.get(o, i);
                if v.is_zero() {
                    continue;
                }
                let target = r * n_out + o;
                for c in 0..cols {
                    let cur: S = out.get(target, c);
                    out.set(target, c, cur.add(v.mul(row[c])));
                }
            }
        }
    }
    Ok(out)
}

/// A model of either semiring.
#[derive(Clone, Debug)]
pub enum AnyModel {
    Complex(Model<C64>),
    Boolean(Model<bool>),
}

impl AnyModel {
    pub fn name(&self) -> &str {
        match self {
            AnyModel::Complex(m) => &m.name,
            AnyModel::Boolean(m) => &m.name,
        }
    }

    pub fn interpret(&self, d: &Diagram) -> ModelResult<Tensor> {
        match self {
            AnyModel::Complex(m) => m.interpret(d).map(Tensor::Complex),
            AnyModel::Boolean(m) => m.interpret(d).map(Tensor::Boolean),
        }
    }

    pub fn scalar_monoid(&self) -> ScalarMonoid {
        match self {
            AnyModel::Complex(_) => ScalarMonoid::Complex,
            AnyModel::Boolean(_) => ScalarMonoid::Boolean,
        }
    }
}

/// Scalars `I -> I` of a model under composition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarMonoid {
    /// `({0, 1}, ∧)`.
    Boolean,
    /// `(C, ·)`.
    Complex,
}

impl ScalarMonoid {
    pub fn describe(&self) -> &'static str {
        match self {
            ScalarMonoid::Boolean => "({0,1}, AND) with unit 1",
            ScalarMonoid::Complex => "(C, multiplication) with unit 1",
        }
    }

    /// Finite multiplication table when the monoid is finite.
    pub fn table(&self) -> Option<Vec<Vec<bool>>> {
        match self {
            ScalarMonoid::Boolean => Some(vec![vec![false, false], vec![false, true]]),
            ScalarMonoid::Complex => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EqualityMode {
    Exact,
    /// Entrywise modulus bound.
    Tolerance(f64),
    /// `a = λ b` for some nonzero `λ`, within the tolerance.
    UpToScalar(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub equal: bool,
    /// Largest entrywise deviation after rescaling.
    pub deviation: f64,
    /// The `λ` with `a ≈ λ b` in scalar mode.
    pub scalar: Option<C64>,
}

/// Compares complex matrices.
pub fn compare(a: &Matrix<C64>, b: &Matrix<C64>, mode: EqualityMode) -> Comparison {
    if a.shape() != b.shape() {
        return Comparison { equal: false, deviation: f64::INFINITY, scalar: None };
    }
    match mode {
        EqualityMode::Exact => {
            let dev = a.max_abs_diff(b);
            Comparison { equal: a == b, deviation: dev, scalar: None }
        }
        EqualityMode::Tolerance(tol) => {
            let dev = a.max_abs_diff(b);
            Comparison { equal: dev <= tol, deviation: dev, scalar: None }
        }
        EqualityMode::UpToScalar(tol) => {
            let (mut k, mut best) = (0, -1.0);
            for (i, z) in b.data().iter().enumerate() {
                if z.norm() > best {
                    best = z.norm();
                    k = i;
                }
            }
            if best <= tol {
                let dev = a.max_abs();
                return Comparison { equal: dev <= tol, deviation: dev, scalar: Some(C64::new(1.0, 0.0)) };
            }
            let lambda = a.data()[k] / b.data()[k];
            let dev = a.max_abs_diff(&b.scale(lambda));
            let scale = a.max_abs().max(1.0);
            let equal = lambda.norm() > tol && dev <= tol * scale;
            Comparison { equal, deviation: dev, scalar: Some(lambda) }
        }
    }
}

/// Compares boolean matrices; the only nonzero scalar is 1, so all modes are exact.
pub fn compare_bool(a: &Matrix<bool>, b: &Matrix<bool>) -> Comparison {
    let equal = a == b;
    Comparison { equal, deviation: if equal { 0.0 } else { 1.0 }, scalar: Some(C64::new(1.0, 0.0)) }
}

/// Compares tensors of the same semiring.
pub fn equal_tensors(a: &Tensor, b: &Tensor, mode: EqualityMode) -> Comparison {
    match (a, b) {
        (Tensor::Complex(x), Tensor::Complex(y)) => compare(x, y, mode),
        (Tensor::Boolean(x), Tensor::Boolean(y)) => compare_bool(x, y),
        _ => Comparison { equal: false, deviation: f64::INFINITY, scalar: None },
    }
}

/// Semirings whose matrices can be compared under an [`EqualityMode`].
pub trait Compare: Scalar {
    /// Whether entries carry magnitudes (inner products, ranks).
    const NUMERIC: bool;
    fn compare_with(a: &Matrix<Self>, b: &Matrix<Self>, mode: EqualityMode) -> Comparison;
    fn to_complex(self) -> C64;
}

impl Compare for C64 {
    const NUMERIC: bool = true;
    fn compare_with(a: &Matrix<C64>, b: &Matrix<C64>, mode: EqualityMode) -> Comparison {
        compare(a, b, mode)
    }
    fn to_complex(self) -> C64 {
        self
    }
}

impl Compare for bool {
    const NUMERIC: bool = false;
    fn compare_with(a: &Matrix<bool>, b: &Matrix<bool>, _: EqualityMode) -> Comparison {
        if a.shape() != b.shape() {
            return Comparison { equal: false, deviation: f64::INFINITY, scalar: None };
        }
        compare_bool(a, b)
    }
    fn to_complex(self) -> C64 {
        C64::new(if self { 1.0 } else { 0.0 }, 0.0)
    }
}

/// Where a rule's two sides disagree.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    /// Basis index on each input wire.
    pub input: Vec<usize>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleVerdict {
    pub rule: String,
    pub sound: bool,
    pub deviation: f64,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SoundnessReport {
    pub model: String,
    pub verdicts: Vec<RuleVerdict>,
}

impl SoundnessReport {
    pub fn all_sound(&self) -> bool {
        self.verdicts.iter().all(|v| v.sound)
    }
}

fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = idx % dims[i];
        idx /= dims[i];
    }
    out
}

fn column_text<S: Scalar>(m: &Matrix<S>, c: usize) -> String {
    let col: Vec<String> = (0..m.rows()).map(|r| format!("{:?}", m.get(r, c))).collect();
    format!("[{}]", col.join(", "))
}

/// Checks every rule's sides have equal interpretations. Boolean models are compared
/// exhaustively on all basis inputs; complex models entrywise and on `samples` random
/// input vectors at tolerance `tol`.
pub fn check_soundness(rules: &[Rule], model: &AnyModel, samples: usize, tol: f64, rng: &mut impl Rng) -> ModelResult<SoundnessReport> {
    let mut verdicts = Vec::new();
    for rule in rules {
        let in_dims: Vec<usize> = match model {
            AnyModel::Complex(m) => rule.lhs.inputs().iter().map(|t| m.dim(t)).collect::<ModelResult<_>>()?,
            AnyModel::Boolean(m) => rule.lhs.inputs().iter().map(|t| m.dim(t)).collect::<ModelResult<_>>()?,
        };
        let verdict = match model {
            AnyModel::Boolean(m) => {
                let (l, r) = (m.interpret(&rule.lhs)?, m.interpret(&rule.rhs)?);
                let bad = (0..l.cols()).find(|&c| l.col(c) != r.col(c));
                RuleVerdict {
                    rule: rule.name.clone(),
                    sound: bad.is_none(),
                    deviation: if bad.is_none() { 0.0 } else { 1.0 },
                    witness: bad.map(|c| Witness { input: digits(c, &in_dims), lhs: column_text(&l, c), rhs: column_text(&r, c) }),
                }
            }
            AnyModel::Complex(m) => {
                let (l, r) = (m.interpret(&rule.lhs)?, m.interpret(&rule.rhs)?);
                let mut dev = l.max_abs_diff(&r);
                for _ in 0..samples {
                    let v = Matrix::from_fn(l.cols(), 1, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                    dev = dev.max(l.compose(&v).max_abs_diff(&r.compose(&v)));
                }
                let bad = (0..l.cols()).max_by(|&a, &b| {
                    l.col(a).max_abs_diff(&r.col(a)).partial_cmp(&l.col(b).max_abs_diff(&r.col(b))).unwrap()
                });
                let sound = dev <= tol;
                RuleVerdict {
                    rule: rule.name.clone(),
                    sound,
                    deviation: dev,
                    witness: if sound {
                        None
                    } else {
                        bad.map(|c| Witness { input: digits(c, &in_dims), lhs: column_text(&l, c), rhs: column_text(&r, c) })
                    },
                }
            }
        };
        verdicts.push(verdict);
    }
    Ok(SoundnessReport { model: model.name().into(), verdicts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::qucirc;

    #[test]
    fn empty_diagram_is_unit_scalar() {
        let m = fixtures::qubit();
        assert_eq!(m.interpret(&Diagram::empty()).unwrap(), Matrix::scalar(C64::new(1.0, 0.0)));
        let b = fixtures::bool_b();
        assert_eq!(b.interpret(&Diagram::empty()).unwrap(), Matrix::scalar(true));
    }

    #[test]
    fn swap_evaluates_to_permutation() {
        let q = qucirc().ty("Q").unwrap();
        let m = fixtures::qubit();
        let s = m.interpret(&Diagram::swap(&q, &q)).unwrap();
        assert_eq!(s, Matrix::wire_permutation(&[2, 2], &[1, 0]));
    }

    #[test]
    fn scalar_comparison_finds_lambda() {
        let a = Matrix::from_real(1, 2, &[2.0, 4.0]);
        let b = Matrix::from_real(1, 2, &[1.0, 2.0]);
        let c = compare(&a, &b, EqualityMode::UpToScalar(1e-9));
        assert!(c.equal);
        assert!((c.scalar.unwrap() - C64::new(2.0, 0.0)).norm() < 1e-12);
        assert!(!compare(&a, &Matrix::from_real(1, 2, &[1.0, 1.0]), EqualityMode::UpToScalar(1e-9)).equal);
        assert!(!compare(&a, &Matrix::zeros(1, 2), EqualityMode::UpToScalar(1e-9)).equal);
        assert!(!compare(&a, &b, EqualityMode::Tolerance(1e-9)).equal);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let q = qucirc();
        let m = fixtures::qubit().with_dim_cap(1 << 6);
        let d = q.identity("Q", 4);
        assert!(m.interpret(&d).is_err());
        let small = fixtures::qubit().with_dim_cap(1 << 8);
        assert!(small.interpret(&d).is_ok());
    }

    #[test]
    fn unbound_generators_are_reported() {
        let q = qucirc();
        let m = Model::<C64>::new("bare").with_dim("Q", 2);
        assert_eq!(m.interpret(&q.gen("CX")), Err(ModelError::UnboundGenerator("CX".into())));
    }

    #[test]
    fn scalar_monoids() {
        assert!(AnyModel::Boolean(fixtures::bool_b()).scalar_monoid().table().unwrap()[1][1]);
        assert!(AnyModel::Complex(fixtures::qubit()).scalar_monoid().table().is_none());
    }
}
