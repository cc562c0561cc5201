use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::tensor::{Matrix, Scalar};
use crate::diagram::Phase;

type PhaseFn<S> = Arc<dyn Fn(&Phase) -> Option<Matrix<S>> + Send + Sync>;

/// Candidate Frobenius algebra on a single system: multiplication `μ: X ⊗ X -> X` and
/// unit `η: I -> X`. Comultiplication and counit are the daggers.
#[derive(Clone)]
pub struct Observable<S> {
    pub name: String,
    dim: usize,
    mu: Matrix<S>,
    eta: Matrix<S>,
    basis: Option<Vec<Matrix<S>>>,
    phase_point: PhaseFn<S>,
}

impl<S: Scalar> fmt::Debug for Observable<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable").field("name", &self.name).field("dim", &self.dim).finish()
    }
}

impl<S: Scalar> Observable<S> {
    /// Arbitrary `(μ, η)`; only the zero phase is interpreted.
    pub fn new(name: impl Into<String>, mu: Matrix<S>, eta: Matrix<S>) -> Self {
        let dim = eta.rows();
        assert_eq!(mu.shape(), (dim, dim * dim), "μ must be D x D²");
        assert_eq!(eta.shape(), (dim, 1), "η must be D x 1");
        Self { name: name.into(), dim, mu, eta, basis: None, phase_point: Arc::new(|_: &Phase| None) }
    }

    /// Structure given by `δ: X -> X ⊗ X` and `ε: X -> I`.
    pub fn from_comonoid(name: impl Into<String>, delta: &Matrix<S>, epsilon: &Matrix<S>) -> Self {
        Self::new(name, delta.dagger(), epsilon.dagger())
    }

    /// Copying structure of an orthonormal basis: `δ|b_i> = |b_i b_i>`, `ε|b_i> = 1`.
    pub fn from_basis(name: impl Into<String>, basis: Vec<Matrix<S>>) -> Self {
        let dim = basis.len();
        assert!(basis.iter().all(|b| b.shape() == (dim, 1)), "basis vectors must be D x 1");
        let mut delta = Matrix::zeros(dim * dim, dim);
        let mut eps = Matrix::zeros(1, dim);
        for b in &basis {
            delta = delta.add(&b.kron(b).compose(&b.dagger()));
            eps = eps.add(&b.dagger());
        }
        let mut o = Self::from_comonoid(name, &delta, &eps);
        o.basis = Some(basis);
        o
    }

    /// Copying structure of the standard basis.
    pub fn standard(name: impl Into<String>, dim: usize) -> Self {
        Self::from_basis(name, (0..dim).map(|i| Matrix::basis(dim, i)).collect())
    }

    /// Interprets group-element phases through a lookup table of phase points.
    pub fn with_phase_table(mut self, table: Vec<(Phase, Matrix<S>)>) -> Self {
        let eta = self.eta.clone();
        self.phase_point = Arc::new(move |p: &Phase| {
            if p.is_zero() {
                return Some(eta.clone());
            }
            table.iter().find(|(q, _)| q == p).map(|(_, m)| m.clone())
        });
        self
    }

    pub fn with_phase_fn(mut self, f: impl Fn(&Phase) -> Option<Matrix<S>> + Send + Sync + 'static) -> Self {
        self.phase_point = Arc::new(f);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mu(&self) -> &Matrix<S> {
        &self.mu
    }

    pub fn eta(&self) -> &Matrix<S> {
        &self.eta
    }

    pub fn delta(&self) -> Matrix<S> {
        self.mu.dagger()
    }

    pub fn epsilon(&self) -> Matrix<S> {
        self.eta.dagger()
    }

    /// The basis this structure was built from, if any.
    pub fn basis(&self) -> Option<&[Matrix<S>]> {
        self.basis.as_deref()
    }

    /// Point `I -> X` a phase denotes.
    pub fn phase_point(&self, p: &Phase) -> Option<Matrix<S>> {
        if p.is_zero() {
            return Some(self.eta.clone());
        }
        (self.phase_point)(p)
    }

    /// `Λ(ψ) = μ ∘ (ψ ⊗ 1)`.
    pub fn phase_action(&self, psi: &Matrix<S>) -> Matrix<S> {
        self.mu.compose(&psi.kron(&Matrix::identity(self.dim)))
    }

    /// `μ_n: X^{⊗n} -> X`, with `μ_0 = η` and `μ_1 = 1`.
    pub fn mu_n(&self, n: usize) -> Matrix<S> {
        match n {
            0 => self.eta.clone(),
            _ => {
                let mut m = Matrix::identity(self.dim);
                for _ in 1..n {
                    m = self.mu.compose(&m.kron(&Matrix::identity(self.dim)));
                }
                m
            }
        }
    }

    /// `δ_n: X -> X^{⊗n}`.
    pub fn delta_n(&self, n: usize) -> Matrix<S> {
        self.mu_n(n).dagger()
    }

    /// Spider `δ_{n_out} ∘ Λ(phase) ∘ μ_{n_in}`; `None` if the phase is not interpreted.
    pub fn spider(&self, n_in: usize, n_out: usize, phase: &Phase) -> Option<Matrix<S>> {
        let m = self.mu_n(n_in);
        let m = if phase.is_zero() { m } else { self.phase_action(&self.phase_point(phase)?).compose(&m) };
        Some(self.delta_n(n_out).compose(&m))
    }

    /// Cup `δ ∘ η` induced by the structure.
    pub fn cup(&self) -> Matrix<S> {
        self.delta().compose(&self.eta)
    }

    pub fn cap(&self) -> Matrix<S> {
        self.epsilon().compose(&self.mu)
    }
}

impl Observable<C64> {
    /// Basis copying structure whose angle phases are `Σ_i w_i b_i` with `w_0 = 1` and
    /// `w_i = e^{iα}` otherwise.
    pub fn with_circle_phases(self) -> Self {
        let basis = self.basis.clone().expect("circle phases need a basis");
        self.with_phase_fn(move |p: &Phase| {
            let a = p.as_angle()?;
            let w = C64::from_polar(1.0, a);
            let mut v = basis[0].clone();
            for b in &basis[1..] {
                v = v.add(&b.scale(w));
            }
            Some(v)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn standard_copy_structure() {
        let z = Observable::<C64>::standard("z", 2);
        assert_eq!(z.eta(), &Matrix::from_real(2, 1, &[1.0, 1.0]));
        let d = z.delta();
        assert_eq!(d.compose(&Matrix::basis(2, 1)), Matrix::basis(4, 3));
        assert_eq!(z.mu_n(3).shape(), (2, 8));
        assert_eq!(z.mu_n(1), Matrix::identity(2));
    }

    #[test]
    fn circle_phase_matches_z_rotation() {
        let z = Observable::<C64>::standard("z", 2).with_circle_phases();
        let s = z.spider(1, 1, &Phase::angle(PI / 2.0)).unwrap();
        let expect = Matrix::from_vec(2, 2, vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0)]);
        assert!(s.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn boolean_copy_structure() {
        let w = Observable::<bool>::standard("w", 3);
        assert_eq!(w.eta(), &Matrix::subset(3, &[0, 1, 2]));
        assert_eq!(w.cup().pairs(), vec![(0, 0), (4, 0), (8, 0)]);
        assert!(w.phase_point(&Phase::cyclic(2, 1)).is_none());
    }
}
