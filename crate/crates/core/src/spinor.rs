//! Spinor fields on `Sⁿ` through the flat cone `ℝ^{n+1} ∖ {0}`.
//!
//! A spinor on `Sⁿ` is a map into a `Cl⁰_{n+1}`-invariant subspace of a
//! `Cl_{n+1}` module of dimension `dim Σ_n`. Tangent vectors act by
//! `c(X)ψ = X·x·ψ` and the spin connection is `∇_X ψ = D_X ψ + ½ X·x·ψ`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::clifford::{build_rep, CliffordRep, HalfSpinorSplit, MODULE_DIMS};
use crate::error::{GksError, Result};
use crate::field::{PolyField, ValueKind};
use crate::linalg::orthonormal_column_basis;
use crate::poly::Poly;
use crate::report::tol;
use crate::sampling;
use crate::sphere::{geodesic_difference, SpherePoint};

pub const MIN_SPHERE_DIM: usize = 2;
pub const MAX_SPHERE_DIM: usize = 15;

/// Real dimension of the spinor module `Σ_n`.
pub fn spinor_dim(n: usize) -> usize {
    MODULE_DIMS[n - 1]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubspaceKind {
    /// The whole `Cl_{n+1}` module.
    Full,
    /// `+1` eigenspace of the `Cl_{n+1}` volume element (`n + 1 ≡ 0 mod 4`).
    VolumeHalf,
    /// Top eigenspace of a symmetric element of the commutant of `Cl⁰_{n+1}`.
    EvenCommutant,
}

#[derive(Debug)]
pub struct SpinorModel {
    n: usize,
    rep: CliffordRep,
    basis: DMatrix<f64>,
    kind: SubspaceKind,
}

fn even_subsets(m: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1 << m))
        .filter(|s| s.count_ones() % 2 == 0)
        .map(move |s| (0..m).filter(|&i| s & (1 << i) != 0).collect())
}

fn even_commutant_subspace(rep: &CliffordRep, target: usize, n: usize) -> Result<DMatrix<f64>> {
    let big_n = rep.module_dim();
    let mut r = ChaCha8Rng::seed_from_u64(0x5eed_0000 + n as u64);
    let g = DMatrix::from_fn(big_n, big_n, |_, _| -> f64 { StandardNormal.sample(&mut r) });
    let sym = (&g + g.transpose()) * 0.5;
    let mut c = DMatrix::<f64>::zeros(big_n, big_n);
    for subset in even_subsets(rep.generators()) {
        let p = rep.product(&subset);
        // (Pᵀ R P)[perm k][perm l] = s_k s_l R[k][l]
        for k in 0..big_n {
            let (pk, sk) = p.row(k);
            for l in 0..big_n {
                let (pl, sl) = p.row(l);
                c[(pk, pl)] += (sk * sl) as f64 * sym[(k, l)];
            }
        }
    }
    let eig = c.symmetric_eigen();
    let top = eig.eigenvalues.max();
    let scale = eig.eigenvalues.amax().max(1.0);
    let cols: Vec<DVector<f64>> = (0..big_n)
        .filter(|&i| (eig.eigenvalues[i] - top).abs() < 1e-8 * scale)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.len() != target {
        return Err(GksError::KernelDimension { expected: target, got: cols.len() });
    }
    let v = DMatrix::from_columns(&cols);
    Ok(orthonormal_column_basis(&(&v * v.transpose()), 1e-9))
}

impl SpinorModel {
    pub fn new(n: usize) -> Result<SpinorModel> {
        if !(MIN_SPHERE_DIM..=MAX_SPHERE_DIM).contains(&n) {
            return Err(GksError::OutOfRange { what: "n", value: n as i64, range: "2..=15" });
        }
        let rep = build_rep(n + 1)?;
        let target = spinor_dim(n);
        let big_n = rep.module_dim();
        let (basis, kind) = if big_n == target {
            (DMatrix::identity(big_n, big_n), SubspaceKind::Full)
        } else if (n + 1).is_multiple_of(4) {
            (rep.half_spinor_split()?.basis_plus(), SubspaceKind::VolumeHalf)
        } else {
            (even_commutant_subspace(&rep, target, n)?, SubspaceKind::EvenCommutant)
        };
        if basis.ncols() != target {
            return Err(GksError::KernelDimension { expected: target, got: basis.ncols() });
        }
        Ok(SpinorModel { n, rep, basis, kind })
    }

    pub fn shared(n: usize) -> Result<Arc<SpinorModel>> {
        SpinorModel::new(n).map(Arc::new)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.n + 1
    }

    pub fn rep(&self) -> &CliffordRep {
        &self.rep
    }

    pub fn module_dim(&self) -> usize {
        self.rep.module_dim()
    }

    /// `dim Σ_n`.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal columns spanning the spinor subspace.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn kind(&self) -> SubspaceKind {
        self.kind
    }

    /// Distance of a module vector from the spinor subspace.
    pub fn subspace_defect(&self, psi: &DVector<f64>) -> f64 {
        let proj = &self.basis * (self.basis.transpose() * psi);
        (psi - proj).norm()
    }

    pub fn random_unit_spinor(&self, rng: &mut ChaCha8Rng) -> DVector<f64> {
        sampling::unit_in_span(rng, &self.basis)
    }

    /// `X·x·ψ` with no tangency check.
    pub fn cliff(&self, x: &[f64], xv: &[f64], psi: &[f64]) -> DVector<f64> {
        let xp = self.rep.apply_vector(x, psi);
        self.rep.apply_vector(xv, xp.as_slice())
    }

    /// Clifford multiplication by a tangent vector.
    pub fn clifford_mult_tangent(&self, x: &SpherePoint, xv: &DVector<f64>, psi: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_point(x)?;
        x.check_tangent(xv)?;
        Ok(self.cliff(x.as_slice(), xv.as_slice(), psi.as_slice()))
    }

    /// Dense matrix of `c(X)` at `x`.
    pub fn cliff_matrix(&self, x: &[f64], xv: &[f64]) -> DMatrix<f64> {
        let gx = self.rep.vector_action(xv).expect("vector length");
        let gp = self.rep.vector_action(x).expect("point length");
        gx * gp
    }

    /// `(X∧Y)·ψ = c(X)c(Y)ψ + g(X,Y)ψ`.
    pub fn two_form(&self, x: &[f64], xv: &[f64], yv: &[f64], psi: &[f64]) -> DVector<f64> {
        let cy = self.cliff(x, yv, psi);
        let g: f64 = xv.iter().zip(yv).map(|(a, b)| a * b).sum();
        self.cliff(x, xv, cy.as_slice()) + DVector::from_column_slice(psi) * g
    }

    fn check_point(&self, x: &SpherePoint) -> Result<()> {
        if x.ambient_dim() != self.ambient_dim() {
            return Err(GksError::DimensionMismatch { expected: self.ambient_dim(), got: x.ambient_dim() });
        }
        Ok(())
    }

    /// Pointwise volume split `c(E_1)⋯c(E_n)` for an oriented frame, `n ≡ 0 mod 8`.
    pub fn sphere_volume_split(&self, x: &SpherePoint, frame: &DMatrix<f64>) -> Result<HalfSpinorSplit> {
        if !self.n.is_multiple_of(8) {
            return Err(GksError::OutOfRange { what: "n", value: self.n as i64, range: "multiples of 8" });
        }
        self.check_point(x)?;
        let big_n = self.module_dim();
        let mut vol = DMatrix::identity(big_n, big_n);
        for i in 0..frame.ncols() {
            let e: Vec<f64> = frame.column(i).iter().copied().collect();
            vol *= self.cliff_matrix(x.as_slice(), &e);
        }
        Ok(HalfSpinorSplit::from_involution(&vol))
    }

    /// `x ↦ -x·ω_{n+1}` as a polynomial matrix field; equals `c(E_1)⋯c(E_n)`
    /// for every oriented frame when `n` is even.
    pub fn sphere_volume_field(&self) -> PolyField {
        let m = self.ambient_dim();
        let big_n = self.module_dim();
        let vol = self.rep.volume();
        let mut comps = vec![Poly::zero(m); big_n * big_n];
        for a in 0..m {
            let p = self.rep.gamma(a).compose(vol);
            for r in 0..big_n {
                let (c, s) = p.row(r);
                comps[r * big_n + c] = comps[r * big_n + c].axpy(-(s as f64), &Poly::var(m, a));
            }
        }
        PolyField::matrix(m, big_n, big_n, comps)
    }
}

/// `Σ_a v_a · (e_a ψ)` for a vector field `v` and module-valued field `ψ`.
pub fn apply_vector_field(rep: &CliffordRep, v: &PolyField, psi: &PolyField) -> PolyField {
    let big_n = rep.module_dim();
    let mut comps = vec![Poly::zero(psi.nvars()); big_n];
    for a in 0..rep.generators() {
        let va = v.at(a);
        if va.is_zero() {
            continue;
        }
        let g = rep.gamma(a);
        for (i, comp) in comps.iter_mut().enumerate() {
            let (j, s) = g.row(i);
            let pj = psi.at(j);
            if !pj.is_zero() {
                *comp = comp.axpy(s as f64, &(va * pj));
            }
        }
    }
    PolyField::new(psi.nvars(), vec![big_n], ValueKind::Spinor, comps)
}

/// The matrix field `M(x)` applied to a spinor field.
pub fn apply_matrix_field(m: &PolyField, psi: &PolyField) -> PolyField {
    m.mat_vec(psi).with_kind(ValueKind::Spinor)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativePath {
    Exact,
    FiniteDifference,
}

impl DerivativePath {
    pub fn tolerance(self) -> f64 {
        match self {
            DerivativePath::Exact => tol::EXACT,
            DerivativePath::FiniteDifference => tol::FINITE_DIFF,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DerivativePath::Exact => "exact",
            DerivativePath::FiniteDifference => "finite-difference",
        }
    }
}

/// A spinor section with value and ambient directional derivatives.
pub trait SpinorSection: Sync {
    fn model(&self) -> &SpinorModel;
    fn value(&self, x: &[f64]) -> DVector<f64>;
    /// Value and derivatives along the columns of `dirs` (one output column each).
    fn derivatives(&self, x: &[f64], dirs: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>);
    fn path(&self) -> DerivativePath {
        DerivativePath::Exact
    }
}

/// A polynomial spinor field.
#[derive(Clone, Debug)]
pub struct SpinorField {
    model: Arc<SpinorModel>,
    value: PolyField,
}

impl SpinorField {
    pub fn new(model: Arc<SpinorModel>, value: PolyField) -> Result<SpinorField> {
        if value.len() != model.module_dim() || value.nvars() != model.ambient_dim() {
            return Err(GksError::DimensionMismatch { expected: model.module_dim(), got: value.len() });
        }
        Ok(SpinorField { model, value: value.with_kind(ValueKind::Spinor) })
    }

    pub fn constant(model: Arc<SpinorModel>, s: &DVector<f64>) -> Result<SpinorField> {
        let m = model.ambient_dim();
        let comps = s.iter().map(|&c| Poly::constant(m, c)).collect();
        SpinorField::new(model, PolyField::new(m, vec![s.len()], ValueKind::Spinor, comps))
    }

    pub fn shared_model(&self) -> &Arc<SpinorModel> {
        &self.model
    }

    pub fn poly(&self) -> &PolyField {
        &self.value
    }

    /// `X·x·ψ` for a polynomial vector field `X`.
    pub fn cliff_by_field(&self, xf: &PolyField) -> SpinorField {
        let rep = self.model.rep();
        let xpsi = apply_vector_field(rep, &PolyField::position(self.model.ambient_dim()), &self.value);
        SpinorField { model: self.model.clone(), value: apply_vector_field(rep, xf, &xpsi) }
    }

    /// `v·ψ` for a polynomial vector field `v` (plain ambient product).
    pub fn mul_vector_field(&self, v: &PolyField) -> SpinorField {
        SpinorField { model: self.model.clone(), value: apply_vector_field(self.model.rep(), v, &self.value) }
    }

    /// `∇_X ψ = D_X ψ + ½ X·x·ψ` as a polynomial field.
    pub fn covariant_derivative_field(&self, xf: &PolyField) -> SpinorField {
        let d = self.value.derivative_along(xf);
        let c = self.cliff_by_field(xf);
        SpinorField { model: self.model.clone(), value: d.axpy(0.5, &c.value) }
    }

    pub fn add(&self, other: &SpinorField) -> SpinorField {
        SpinorField { model: self.model.clone(), value: self.value.add(&other.value) }
    }

    pub fn scale(&self, s: f64) -> SpinorField {
        SpinorField { model: self.model.clone(), value: self.value.scale(s) }
    }

    pub fn scale_by(&self, p: &Poly) -> SpinorField {
        SpinorField { model: self.model.clone(), value: self.value.scale_by(p) }
    }

    pub fn map_value(&self, f: impl FnOnce(&PolyField) -> PolyField) -> SpinorField {
        SpinorField { model: self.model.clone(), value: f(&self.value) }
    }

    /// `|ψ|²` as a polynomial.
    pub fn norm_squared(&self) -> Poly {
        self.value.dot(&self.value)
    }
}

impl SpinorSection for SpinorField {
    fn model(&self) -> &SpinorModel {
        &self.model
    }

    fn value(&self, x: &[f64]) -> DVector<f64> {
        self.value.eval_vector(x)
    }

    fn derivatives(&self, x: &[f64], dirs: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let jet = self.value.jet(x);
        (DVector::from_vec(jet.value), jet.jacobian * dirs)
    }
}

/// `ψ / |ψ|` with the exact quotient-rule derivative.
pub struct Normalized<S>(pub S);

impl<S: SpinorSection> SpinorSection for Normalized<S> {
    fn model(&self) -> &SpinorModel {
        self.0.model()
    }

    fn value(&self, x: &[f64]) -> DVector<f64> {
        self.0.value(x).normalize()
    }

    fn derivatives(&self, x: &[f64], dirs: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let (v, d) = self.0.derivatives(x, dirs);
        let r = v.norm();
        let u = &v / r;
        let mut out = d / r;
        for mut col in out.column_iter_mut() {
            let s = u.dot(&col);
            col.axpy(-s, &u, 1.0);
        }
        (u, out)
    }

    fn path(&self) -> DerivativePath {
        self.0.path()
    }
}

/// A black-box section defined only on the sphere; derivatives by central
/// differences along great circles.
pub struct BlackBox<'a, F> {
    pub model: &'a SpinorModel,
    pub f: F,
    pub step: f64,
}

impl<'a, F: Fn(&[f64]) -> DVector<f64> + Sync> BlackBox<'a, F> {
    pub fn new(model: &'a SpinorModel, f: F) -> Self {
        BlackBox { model, f, step: tol::FD_STEP }
    }
}

impl<F: Fn(&[f64]) -> DVector<f64> + Sync> SpinorSection for BlackBox<'_, F> {
    fn model(&self) -> &SpinorModel {
        self.model
    }

    fn value(&self, x: &[f64]) -> DVector<f64> {
        (self.f)(x)
    }

    fn derivatives(&self, x: &[f64], dirs: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let xv = DVector::from_column_slice(x);
        let cols: Vec<DVector<f64>> = dirs
            .column_iter()
            .map(|d| geodesic_difference(&self.f, &xv, &d.into_owned(), self.step))
            .collect();
        ((self.f)(x), DMatrix::from_columns(&cols))
    }

    fn path(&self) -> DerivativePath {
        DerivativePath::FiniteDifference
    }
}

/// `∇_X ψ` at `x` for a tangent vector `X`.
pub fn spinor_covariant_derivative(
    psi: &dyn SpinorSection,
    x: &SpherePoint,
    xv: &DVector<f64>,
) -> Result<DVector<f64>> {
    x.check_tangent(xv)?;
    let dirs = DMatrix::from_column_slice(xv.len(), 1, xv.as_slice());
    let (v, d) = psi.derivatives(x.as_slice(), &dirs);
    let c = psi.model().cliff(x.as_slice(), xv.as_slice(), v.as_slice());
    Ok(d.column(0) + c * 0.5)
}

/// Value and `[∇_{E_1}ψ, …, ∇_{E_n}ψ]` for the tangent frame `E`.
pub fn covariant_derivatives(psi: &dyn SpinorSection, x: &[f64], frame: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let (v, mut d) = psi.derivatives(x, frame);
    let model = psi.model();
    for i in 0..frame.ncols() {
        let e: Vec<f64> = frame.column(i).iter().copied().collect();
        let c = model.cliff(x, &e, v.as_slice());
        let mut col = d.column_mut(i);
        col.axpy(0.5, &c, 1.0);
    }
    (v, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KillingSign {
    Plus,
    Minus,
}

impl KillingSign {
    pub fn constant(self) -> f64 {
        match self {
            KillingSign::Plus => 0.5,
            KillingSign::Minus => -0.5,
        }
    }

    pub fn from_constant(c: f64) -> Option<KillingSign> {
        if c == 0.5 {
            Some(KillingSign::Plus)
        } else if c == -0.5 {
            Some(KillingSign::Minus)
        } else {
            None
        }
    }
}

/// Killing spinors with constant `±½`: constants `s_k` for `+½` and
/// `x·e_{n+1}·s_k` for `-½`, over the orthonormal basis `s_k` of the model.
pub fn killing_basis(model: &Arc<SpinorModel>, sign: KillingSign) -> Vec<SpinorField> {
    let m = model.ambient_dim();
    let rep = model.rep();
    (0..model.dim())
        .map(|k| {
            let s = model.basis().column(k).into_owned();
            match sign {
                KillingSign::Plus => SpinorField::constant(model.clone(), &s).expect("basis length"),
                KillingSign::Minus => {
                    let es = rep.gamma(m - 1).apply(s.as_slice());
                    let w: Vec<DVector<f64>> = (0..m).map(|a| rep.gamma(a).apply(es.as_slice())).collect();
                    let comps = (0..model.module_dim())
                        .map(|i| Poly::linear(&w.iter().map(|wa| wa[i]).collect::<Vec<_>>()))
                        .collect();
                    SpinorField::new(model.clone(), PolyField::new(m, vec![model.module_dim()], ValueKind::Spinor, comps))
                        .expect("module length")
                }
            }
        })
        .collect()
}

/// Max over frame vectors of `|∇_{E_i}ψ - c·c(E_i)ψ|`.
pub fn killing_residual(psi: &dyn SpinorSection, x: &SpherePoint, constant: f64) -> f64 {
    let frame = x.frame();
    let (v, nab) = covariant_derivatives(psi, x.as_slice(), &frame);
    let model = psi.model();
    (0..frame.ncols())
        .map(|i| {
            let e: Vec<f64> = frame.column(i).iter().copied().collect();
            let c = model.cliff(x.as_slice(), &e, v.as_slice());
            (nab.column(i) - c * constant).norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{rng, tangent_vector};
    use crate::sphere::{random_frame, tangential_extension};

    #[test]
    fn model_dimensions_match_spinor_modules() {
        for (n, d) in [(2, 4), (3, 4), (7, 8), (8, 16), (9, 32), (11, 64), (15, 128)] {
            let m = SpinorModel::new(n).unwrap();
            assert_eq!(m.dim(), d, "n = {n}");
            assert!((m.basis().transpose() * m.basis() - DMatrix::identity(d, d)).amax() < 1e-12);
        }
        assert!(SpinorModel::new(1).is_err());
        assert!(SpinorModel::new(16).is_err());
    }

    #[test]
    fn subspace_is_invariant_under_even_products() {
        for n in [3, 8, 9] {
            let m = SpinorModel::new(n).unwrap();
            let mut r = rng(n as u64);
            let x = SpherePoint::sample(&mut r, n);
            let xv = tangent_vector(&mut r, x.vector());
            let psi = m.random_unit_spinor(&mut r);
            let c = m.clifford_mult_tangent(&x, &xv, &psi).unwrap();
            assert!(m.subspace_defect(&c) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn tangent_clifford_relations() {
        let m = SpinorModel::new(7).unwrap();
        let mut r = rng(5);
        let x = SpherePoint::sample(&mut r, 7);
        let xv = tangent_vector(&mut r, x.vector());
        let psi = m.random_unit_spinor(&mut r);
        let c = m.clifford_mult_tangent(&x, &xv, &psi).unwrap();
        assert!((c.norm() - xv.norm()).abs() < 1e-13);
        assert!(c.dot(&psi).abs() < 1e-13);
        let cc = m.clifford_mult_tangent(&x, &xv, &c).unwrap();
        assert!((cc + &psi * xv.norm_squared()).norm() < 1e-12);
        assert!(matches!(
            m.clifford_mult_tangent(&x, x.vector(), &psi),
            Err(GksError::NotTangent(_))
        ));
    }

    #[test]
    fn killing_bases_satisfy_their_equation() {
        let model = SpinorModel::shared(3).unwrap();
        let mut r = rng(9);
        for sign in [KillingSign::Plus, KillingSign::Minus] {
            let basis = killing_basis(&model, sign);
            assert_eq!(basis.len(), 4);
            for _ in 0..5 {
                let x = SpherePoint::sample(&mut r, 3);
                for psi in &basis {
                    assert!(killing_residual(psi, &x, sign.constant()) < 1e-12);
                    assert!(model.subspace_defect(&psi.value(x.as_slice())) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn spinorial_curvature_is_minus_half_two_form() {
        let model = SpinorModel::shared(3).unwrap();
        let mut r = rng(11);
        let x = SpherePoint::sample(&mut r, 3);
        let xv = tangent_vector(&mut r, x.vector());
        let yv = tangent_vector(&mut r, x.vector());
        let xf = tangential_extension(&xv);
        let yf = tangential_extension(&yv);
        // A non-Killing field: x_0 times a constant spinor.
        let s = model.random_unit_spinor(&mut r);
        let psi = SpinorField::constant(model.clone(), &s).unwrap().scale_by(&Poly::var(4, 0));
        let nx = psi.covariant_derivative_field(&xf);
        let ny = psi.covariant_derivative_field(&yf);
        let nxy = ny.covariant_derivative_field(&xf);
        let nyx = nx.covariant_derivative_field(&yf);
        let bracket = yf.derivative_along(&xf).sub(&xf.derivative_along(&yf));
        let nb = psi.covariant_derivative_field(&bracket);
        let p = x.as_slice();
        let lhs = nxy.value(p) - nyx.value(p) - nb.value(p);
        let rhs = model.two_form(p, xv.as_slice(), yv.as_slice(), psi.value(p).as_slice()) * -0.5;
        assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn volume_split_is_frame_independent_and_polynomial() {
        let model = SpinorModel::new(8).unwrap();
        let mut r = rng(4);
        let x = SpherePoint::sample(&mut r, 8);
        let a = model.sphere_volume_split(&x, &x.frame()).unwrap();
        let b = model.sphere_volume_split(&x, &random_frame(&mut r, x.vector())).unwrap();
        assert!((&a.proj_plus - &b.proj_plus).amax() < 1e-10);
        let vol = model.sphere_volume_field().eval_matrix(x.as_slice());
        assert!((&a.proj_plus - (DMatrix::identity(32, 32) + vol) * 0.5).amax() < 1e-12);
        assert!(SpinorModel::new(7).unwrap().sphere_volume_split(&SpherePoint::sample(&mut r, 7), &DMatrix::zeros(8, 7)).is_err());
    }

    #[test]
    fn normalized_section_derivative_matches_difference_quotient() {
        let model = SpinorModel::shared(3).unwrap();
        let plus = killing_basis(&model, KillingSign::Plus);
        let minus = killing_basis(&model, KillingSign::Minus);
        let mix = plus[0].add(&minus[1].scale_by(&Poly::var(4, 0)));
        let norm = Normalized(mix);
        let mut r = rng(2);
        let x = SpherePoint::sample(&mut r, 3);
        let frame = x.frame();
        let (_, exact) = norm.derivatives(x.as_slice(), &frame);
        let bb = BlackBox::new(&model, |p: &[f64]| norm.value(p));
        let (_, fd) = bb.derivatives(x.as_slice(), &frame);
        assert!((exact - fd).amax() < 1e-8);
    }
}
