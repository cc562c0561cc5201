use std::fmt;

use num_complex::Complex64 as C64;

/// Commutative semiring of matrix entries.
pub trait Scalar: Copy + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(self, other: Self) -> Self;
    fn mul(self, other: Self) -> Self;
    /// Involution used by the dagger: complex conjugation, identity on booleans.
    fn conj(self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Scalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn mul(self, other: Self) -> Self {
        self * other
    }
    fn conj(self) -> Self {
        C64::conj(&self)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

impl Scalar for bool {
    fn zero() -> Self {
        false
    }
    fn one() -> Self {
        true
    }
    fn add(self, other: Self) -> Self {
        self || other
    }
    fn mul(self, other: Self) -> Self {
        self && other
    }
    fn conj(self) -> Self {
        self
    }
    fn is_zero(&self) -> bool {
        !*self
    }
}

/// Dense row-major matrix. A map `A -> B` is stored with `rows = dim B`, `cols = dim A`;
/// tensor factors are laid out with the first wire most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Column vector `I -> A`.
    pub fn column(entries: Vec<S>) -> Self {
        let n = entries.len();
        Self::from_vec(n, 1, entries)
    }

    /// Row vector `A -> I`.
    pub fn row(entries: Vec<S>) -> Self {
        let n = entries.len();
        Self::from_vec(1, n, entries)
    }

    pub fn scalar(s: S) -> Self {
        Self::from_vec(1, 1, vec![s])
    }

    /// Standard basis column `|i>` of dimension `n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut m = Self::zeros(n, 1);
        m.data[i] = S::one();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> S {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.cols + c] = v;
    }

    /// `self ∘ other`, i.e. the matrix product `self * other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "composition of mismatched shapes");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    out.data[idx] = out.data[idx].add(a.mul(other.data[k * other.cols + c]));
                }
            }
        }
        out
    }

    /// Kronecker product; `self` is the more significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.data[r1 * self.cols + c1];
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        let r = r1 * other.rows + r2;
                        let c = c1 * other.cols + c2;
                        out.data[r * cols + c] = a.mul(other.data[r2 * other.cols + c2]);
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Conjugate transpose (relational converse for booleans).
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.conj()).collect() }
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn scale(&self, s: S) -> Self {
        self.map(|x| s.mul(x))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "sum of mismatched shapes");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a.add(b)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc.add(self.get(i, i)))
    }

    /// Column `c` as a column vector.
    pub fn col(&self, c: usize) -> Self {
        Self::from_fn(self.rows, 1, |r, _| self.get(r, c))
    }

    /// Kronecker product of a list; the empty product is the 1x1 unit.
    pub fn kron_all<'a>(items: impl IntoIterator<Item = &'a Self>) -> Self {
        items.into_iter().fold(Self::scalar(S::one()), |acc, m| acc.kron(m))
    }

    /// Permutation matrix sending wire `i` of the input to wire `perm[i]` of the output.
    pub fn wire_permutation(dims: &[usize], perm: &[usize]) -> Self {
        assert_eq!(dims.len(), perm.len());
        let n = dims.len();
        let total: usize = dims.iter().product();
        let mut out_dims = vec![0; n];
        for i in 0..n {
            out_dims[perm[i]] = dims[i];
        }
        let mut m = Self::zeros(total, total);
        let mut digits = vec![0; n];
        for col in 0..total {
            let mut rem = col;
            for i in (0..n).rev() {
                digits[i] = rem % dims[i];
                rem /= dims[i];
            }
            let mut row = 0;
            for j in 0..n {
                let src = perm.iter().position(|&p| p == j).unwrap();
                row = row * out_dims[j] + digits[src];
            }
            m.data[row * total + col] = S::one();
        }
        m
    }
}

impl Matrix<C64> {
    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// `<self|other>` for column vectors.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.shape(), other.shape());
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Numerical rank by Gaussian elimination with partial pivoting.
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for c in 0..cols {
            if rank == rows {
                break;
            }
            let (piv, best) = (rank..rows)
                .map(|r| (r, a[r * cols + c].norm()))
                .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= tol {
                continue;
            }
            for k in 0..cols {
                a.swap(rank * cols + k, piv * cols + k);
            }
            let p = a[rank * cols + c];
            for r in 0..rows {
                if r != rank {
                    let f = a[r * cols + c] / p;
                    if f.norm() > 0.0 {
                        for k in 0..cols {
                            let v = a[rank * cols + k];
                            a[r * cols + k] -= f * v;
                        }
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

impl Matrix<bool> {
    /// Relation as a set of `(row, col)` pairs.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    out.push((r, c));
                }
            }
        }
        out
    }

    /// Subset of an `n`-element set as a point `I -> n`.
    pub fn subset(n: usize, members: &[usize]) -> Self {
        let mut m = Self::zeros(n, 1);
        for &i in members {
            m.data[i] = true;
        }
        m
    }

    /// Graph of a function `f: cols -> rows`.
    pub fn function(rows: usize, cols: usize, f: impl Fn(usize) -> usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for c in 0..cols {
            m.data[f(c) * cols + c] = true;
        }
        m
    }
}

/// Semiring-tagged tensor, as handled by model-agnostic code.
#[derive(Clone, Debug, PartialEq)]
pub enum Tensor {
    Complex(Matrix<C64>),
    Boolean(Matrix<bool>),
}

impl Tensor {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Tensor::Complex(m) => m.shape(),
            Tensor::Boolean(m) => m.shape(),
        }
    }

    pub fn as_complex(&self) -> Option<&Matrix<C64>> {
        match self {
            Tensor::Complex(m) => Some(m),
            Tensor::Boolean(_) => None,
        }
    }

    pub fn as_boolean(&self) -> Option<&Matrix<bool>> {
        match self {
            Tensor::Boolean(m) => Some(m),
            Tensor::Complex(_) => None,
        }
    }

    /// Lossless text form: complex entries as `(re, im)` pairs with 17 significant digits,
    /// booleans as a 0/1 grid.
    pub fn to_text(&self) -> String {
        self.render(17)
    }

    /// Text form with `digits` significant digits.
    pub fn render(&self, digits: usize) -> String {
        let (rows, cols) = self.shape();
        let mut out = String::new();
        match self {
            Tensor::Complex(m) => {
                out.push_str(&format!("complex {rows}x{cols}\n"));
                for r in 0..rows {
                    let line: Vec<String> = (0..cols)
                        .map(|c| {
                            let z = m.get(r, c);
                            format!("({}, {})", fmt_sig(z.re, digits), fmt_sig(z.im, digits))
                        })
                        .collect();
                    out.push_str(&line.join(" "));
                    out.push('\n');
                }
            }
            Tensor::Boolean(m) => {
                out.push_str(&format!("boolean {rows}x{cols}\n"));
                for r in 0..rows {
                    let line: String =
                        (0..cols).map(|c| if m.get(r, c) { '1' } else { '0' }).collect();
                    out.push_str(&line);
                    out.push('\n');
                }
            }
        }
        out
    }

    /// Inverse of [`Tensor::to_text`].
    pub fn from_text(text: &str) -> Option<Tensor> {
        let mut lines = text.lines();
        let header = lines.next()?;
        let (kind, shape) = header.split_once(' ')?;
        let (rows, cols) = shape.split_once('x')?;
        let rows: usize = rows.parse().ok()?;
        let cols: usize = cols.parse().ok()?;
        match kind {
            "complex" => {
                let mut data = Vec::with_capacity(rows * cols);
                for _ in 0..rows {
                    let line = lines.next()?;
                    for part in line.split(')').map(str::trim).filter(|s| !s.is_empty()) {
                        let inner = part.strip_prefix('(')?;
                        let (re, im) = inner.split_once(',')?;
                        data.push(C64::new(re.trim().parse().ok()?, im.trim().parse().ok()?));
                    }
                }
                (data.len() == rows * cols).then(|| Tensor::Complex(Matrix::from_vec(rows, cols, data)))
            }
            "boolean" => {
                let mut data = Vec::with_capacity(rows * cols);
                for _ in 0..rows {
                    for ch in lines.next()?.chars() {
                        match ch {
                            '0' => data.push(false),
                            '1' => data.push(true),
                            _ => return None,
                        }
                    }
                }
                (data.len() == rows * cols).then(|| Tensor::Boolean(Matrix::from_vec(rows, cols, data)))
            }
            _ => None,
        }
    }
}

/// Formats `x` with `digits` significant digits, trimming trailing zeros.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    let (mant, exp) = s.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..17).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let t = format!("{:.*}", decimals, x);
        let t = if t.contains('.') { t.trim_end_matches('0').trim_end_matches('.').to_string() } else { t };
        if t == "-0" { "0".into() } else { t }
    } else {
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{exp}")
    }
}
