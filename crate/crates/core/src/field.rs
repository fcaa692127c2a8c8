//! Polynomial maps from ambient `ℝ^{n+1}` into a finite-dimensional value space.

use nalgebra::{DMatrix, DVector};

use crate::poly::{Poly, Powers};

/// What the components of a [`PolyField`] represent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueKind {
    Scalar,
    Vector,
    Spinor,
    SymmetricMatrix,
    Matrix,
    Tensor,
}

/// Components stored row-major according to `shape`.
#[derive(Clone, Debug)]
pub struct PolyField {
    nvars: usize,
    shape: Vec<usize>,
    kind: ValueKind,
    comps: Vec<Poly>,
}

/// Value and Jacobian (`components × nvars`) at a single point.
pub struct Jet {
    pub value: Vec<f64>,
    pub jacobian: DMatrix<f64>,
}

impl Jet {
    /// Directional derivative of every component along `dir`.
    pub fn along(&self, dir: &DVector<f64>) -> DVector<f64> {
        &self.jacobian * dir
    }
}

impl PolyField {
    pub fn new(nvars: usize, shape: Vec<usize>, kind: ValueKind, comps: Vec<Poly>) -> Self {
        assert_eq!(shape.iter().product::<usize>(), comps.len(), "shape/component mismatch");
        assert!(comps.iter().all(|p| p.nvars() == nvars));
        PolyField { nvars, shape, kind, comps }
    }

    pub fn zeros(nvars: usize, shape: Vec<usize>, kind: ValueKind) -> Self {
        let len = shape.iter().product();
        PolyField::new(nvars, shape, kind, vec![Poly::zero(nvars); len])
    }

    pub fn scalar(p: Poly) -> Self {
        PolyField::new(p.nvars(), vec![], ValueKind::Scalar, vec![p])
    }

    pub fn vector(nvars: usize, comps: Vec<Poly>) -> Self {
        PolyField::new(nvars, vec![comps.len()], ValueKind::Vector, comps)
    }

    pub fn matrix(nvars: usize, rows: usize, cols: usize, comps: Vec<Poly>) -> Self {
        PolyField::new(nvars, vec![rows, cols], ValueKind::Matrix, comps)
    }

    /// The position field `x ↦ x`.
    pub fn position(nvars: usize) -> Self {
        PolyField::vector(nvars, (0..nvars).map(|i| Poly::var(nvars, i)).collect())
    }

    pub fn constant_vector(v: &DVector<f64>) -> Self {
        let n = v.len();
        PolyField::vector(n, v.iter().map(|&c| Poly::constant(n, c)).collect())
    }

    pub fn constant_matrix(nvars: usize, m: &DMatrix<f64>) -> Self {
        let comps = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| Poly::constant(nvars, m[(i, j)]))
            .collect();
        PolyField::matrix(nvars, m.nrows(), m.ncols(), comps)
    }

    /// The linear vector field `x ↦ M x`.
    pub fn linear_vector(m: &DMatrix<f64>) -> Self {
        let n = m.ncols();
        let comps = (0..m.nrows())
            .map(|i| Poly::linear(&m.row(i).iter().copied().collect::<Vec<_>>()))
            .collect();
        PolyField::vector(n, comps)
    }

    /// `x ↦ I - x xᵀ`; the orthogonal projection onto `T_x S^n` at sphere points.
    pub fn tangent_projector(nvars: usize) -> Self {
        let x = PolyField::position(nvars);
        let id = PolyField::constant_matrix(nvars, &DMatrix::identity(nvars, nvars));
        id.sub(&x.outer(&x))
    }

    pub fn with_kind(mut self, kind: ValueKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.comps.iter().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn rows(&self) -> usize {
        self.shape[0]
    }

    pub fn cols(&self) -> usize {
        self.shape[1]
    }

    pub fn at(&self, i: usize) -> &Poly {
        &self.comps[i]
    }

    pub fn at2(&self, i: usize, j: usize) -> &Poly {
        &self.comps[i * self.shape[1] + j]
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let pw = Powers::new(x, self.degree());
        self.comps.iter().map(|p| p.eval_with(&pw)).collect()
    }

    pub fn eval_vector(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_vec(self.eval(x))
    }

    pub fn eval_matrix(&self, x: &[f64]) -> DMatrix<f64> {
        assert_eq!(self.shape.len(), 2);
        DMatrix::from_row_slice(self.shape[0], self.shape[1], &self.eval(x))
    }

    pub fn jet(&self, x: &[f64]) -> Jet {
        let pw = Powers::new(x, self.degree());
        let mut jacobian = DMatrix::zeros(self.comps.len(), self.nvars);
        let mut grad = vec![0.0; self.nvars];
        let value = self
            .comps
            .iter()
            .enumerate()
            .map(|(r, p)| {
                let v = p.eval_grad_with(&pw, &mut grad);
                for (c, g) in grad.iter().enumerate() {
                    jacobian[(r, c)] = *g;
                }
                v
            })
            .collect();
        Jet { value, jacobian }
    }

    /// Exact directional derivative of a matrix-valued field at `x` along `dir`.
    pub fn matrix_derivative(&self, x: &[f64], dir: &DVector<f64>) -> DMatrix<f64> {
        let d = self.jet(x).along(dir);
        DMatrix::from_row_slice(self.shape[0], self.shape[1], d.as_slice())
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PolyField {
        PolyField { comps: self.comps.iter().map(f).collect(), ..self.clone() }
    }

    pub fn partial(&self, a: usize) -> PolyField {
        self.map(|p| p.partial(a))
    }

    /// Ambient derivative along a polynomial vector field, componentwise.
    pub fn derivative_along(&self, v: &PolyField) -> PolyField {
        assert_eq!(v.len(), self.nvars);
        self.map(|p| p.derivative_along(v.comps()))
    }

    pub fn reduce_on_sphere(&self) -> PolyField {
        self.map(Poly::reduce_on_sphere)
    }

    pub fn scale(&self, s: f64) -> PolyField {
        self.map(|p| p.scale(s))
    }

    pub fn scale_by(&self, s: &Poly) -> PolyField {
        self.map(|p| p * s)
    }

    pub fn add(&self, other: &PolyField) -> PolyField {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &PolyField) -> PolyField {
        self.axpy(-1.0, other)
    }

    pub fn axpy(&self, s: f64, other: &PolyField) -> PolyField {
        assert_eq!(self.shape, other.shape);
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.axpy(s, b)).collect();
        PolyField { comps, ..self.clone() }
    }

    /// Euclidean pairing of two vector fields.
    pub fn dot(&self, other: &PolyField) -> Poly {
        assert_eq!(self.len(), other.len());
        let mut acc = Poly::zero(self.nvars);
        for (a, b) in self.comps.iter().zip(&other.comps) {
            acc += &(a * b);
        }
        acc
    }

    /// `u vᵀ` for vector fields `u`, `v`.
    pub fn outer(&self, other: &PolyField) -> PolyField {
        let comps = self
            .comps
            .iter()
            .flat_map(|a| other.comps.iter().map(move |b| a * b))
            .collect();
        PolyField::matrix(self.nvars, self.len(), other.len(), comps)
    }

    pub fn transpose(&self) -> PolyField {
        let (r, c) = (self.rows(), self.cols());
        let comps = (0..c)
            .flat_map(|j| (0..r).map(move |i| (i, j)))
            .map(|(i, j)| self.at2(i, j).clone())
            .collect();
        PolyField::new(self.nvars, vec![c, r], self.kind, comps)
    }

    pub fn mat_vec(&self, v: &PolyField) -> PolyField {
        let (r, c) = (self.rows(), self.cols());
        assert_eq!(c, v.len());
        let comps = (0..r)
            .map(|i| {
                let mut acc = Poly::zero(self.nvars);
                for j in 0..c {
                    let (m, b) = (self.at2(i, j), v.at(j));
                    if !m.is_zero() && !b.is_zero() {
                        acc += &(m * b);
                    }
                }
                acc
            })
            .collect();
        PolyField::vector(self.nvars, comps)
    }

    pub fn mat_mul(&self, other: &PolyField) -> PolyField {
        let (r, k, c) = (self.rows(), self.cols(), other.cols());
        assert_eq!(k, other.rows());
        let mut comps = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                let mut acc = Poly::zero(self.nvars);
                for l in 0..k {
                    let (a, b) = (self.at2(i, l), other.at2(l, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                comps.push(acc);
            }
        }
        PolyField::matrix(self.nvars, r, c, comps)
    }

    pub fn trace(&self) -> Poly {
        let mut acc = Poly::zero(self.nvars);
        for i in 0..self.rows() {
            acc += self.at2(i, i);
        }
        acc
    }
}
