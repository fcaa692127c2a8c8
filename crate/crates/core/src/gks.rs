//! The generalized Killing equation `∇_X ψ = A(X)·ψ`: residuals, pointwise
//! extraction of `A`, the constraint and curvature equations, and the
//! chirality pipeline on `S^{8k}`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GksError, Result};
use crate::field::{PolyField, ValueKind};
use crate::linalg::{condition_number, sym_eigenvalues};
use crate::poly::Poly;
use crate::report::{tol, Check};
use crate::sampling;
use crate::sphere::{scalar_curvature, SpherePoint};
use crate::spinor::{apply_matrix_field, apply_vector_field, covariant_derivatives, DerivativePath, SpinorField, SpinorSection};

/// A symmetric endomorphism field of `TSⁿ`, stored as an ambient
/// `(n+1)×(n+1)` polynomial matrix that kills `x` on the sphere.
#[derive(Clone, Debug)]
pub struct SymEndField {
    value: PolyField,
}

impl SymEndField {
    pub fn new(value: PolyField) -> Result<SymEndField> {
        let shape = value.shape();
        if shape.len() != 2 || shape[0] != shape[1] || shape[0] != value.nvars() {
            return Err(GksError::DimensionMismatch { expected: value.nvars(), got: shape.first().copied().unwrap_or(0) });
        }
        Ok(SymEndField { value: value.with_kind(ValueKind::SymmetricMatrix) })
    }

    /// `c·(I - x xᵀ)`, i.e. `c·Id` on `TSⁿ`.
    pub fn scalar(ambient: usize, c: f64) -> SymEndField {
        SymEndField::new(PolyField::tangent_projector(ambient).scale(c)).expect("square")
    }

    pub fn poly(&self) -> &PolyField {
        &self.value
    }

    pub fn ambient_dim(&self) -> usize {
        self.value.nvars()
    }

    pub fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        self.value.eval_matrix(x)
    }

    /// `(‖A - Aᵀ‖, ‖A x‖)` at a sphere point.
    pub fn invariant_defects(&self, x: &SpherePoint) -> (f64, f64) {
        let a = self.eval(x.as_slice());
        ((&a - a.transpose()).amax(), (&a * x.vector()).amax())
    }

    /// `∇_X A = P_T (D_X A) P_T` at a sphere point, as an ambient matrix.
    pub fn covariant_derivative(&self, x: &SpherePoint, xv: &DVector<f64>) -> DMatrix<f64> {
        let p = x.projector();
        &p * self.value.matrix_derivative(x.as_slice(), xv) * &p
    }

    pub fn trace(&self) -> Poly {
        self.value.trace()
    }
}

/// `A` recovered at one point from `∇_{E_i}ψ = c(A E_i)ψ` by least squares.
#[derive(Clone, Debug)]
pub struct ExtractedA {
    /// In the tangent frame used.
    pub frame_matrix: DMatrix<f64>,
    /// `E A Eᵀ`.
    pub ambient: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    pub symmetry_defect: f64,
    pub fit_residual: f64,
}

impl ExtractedA {
    pub fn residual(&self) -> f64 {
        self.symmetry_defect.max(self.fit_residual)
    }

    pub fn ensure(self, tolerance: f64) -> Result<ExtractedA> {
        if self.residual() > tolerance {
            return Err(GksError::NotGeneralizedKilling(self.residual()));
        }
        Ok(self)
    }
}

fn cliff_columns(psi: &dyn SpinorSection, x: &[f64], vectors: &DMatrix<f64>, v: &DVector<f64>) -> DMatrix<f64> {
    let model = psi.model();
    let cols: Vec<DVector<f64>> = vectors
        .column_iter()
        .map(|e| model.cliff(x, e.as_slice(), v.as_slice()))
        .collect();
    DMatrix::from_columns(&cols)
}

fn check_unit(v: &DVector<f64>) -> Result<()> {
    let n = v.norm();
    if (n - 1.0).abs() > tol::UNIT_SPINOR {
        return Err(GksError::NotUnit(n));
    }
    Ok(())
}

pub fn extract_a(psi: &dyn SpinorSection, x: &SpherePoint) -> Result<ExtractedA> {
    let frame = x.frame();
    let (v, nab) = covariant_derivatives(psi, x.as_slice(), &frame);
    check_unit(&v)?;
    let b = cliff_columns(psi, x.as_slice(), &frame, &v);
    let normal = b.transpose() * &b;
    let rhs = b.transpose() * &nab;
    let a = normal
        .cholesky()
        .ok_or_else(|| GksError::Singular("normal equations of c(·)ψ".into()))?
        .solve(&rhs);
    let fit_residual = (&nab - &b * &a).column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let symmetry_defect = (&a - a.transpose()).amax();
    let ambient = &frame * &a * frame.transpose();
    Ok(ExtractedA { eigenvalues: sym_eigenvalues(&a), frame_matrix: a, ambient, symmetry_defect, fit_residual })
}

/// Per-point residuals of the generalized Killing equation and its consequences.
#[derive(Clone, Debug, Default)]
struct PointResiduals {
    gks: f64,
    constraint1: f64,
    constraint2: f64,
    curvature: f64,
    unit: f64,
    spectrum: Vec<f64>,
}

fn max_col_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn gks_at(psi: &dyn SpinorSection, a: &SymEndField, x: &SpherePoint) -> Result<(f64, f64)> {
    let frame = x.frame();
    let (v, nab) = covariant_derivatives(psi, x.as_slice(), &frame);
    let amat = a.eval(x.as_slice());
    let ae = &amat * &frame;
    let c = cliff_columns(psi, x.as_slice(), &ae, &v);
    Ok((max_col_norm(&(nab - c)), (v.norm() - 1.0).abs()))
}

/// Max over frame vectors of `|∇_{E_i}ψ - c(A E_i)ψ|` at one point.
pub fn gks_residual(psi: &dyn SpinorSection, a: &SymEndField, x: &SpherePoint) -> Result<f64> {
    let (r, unit) = gks_at(psi, a, x)?;
    if unit > tol::UNIT_SPINOR {
        return Err(GksError::NotUnit(1.0 + unit));
    }
    Ok(r)
}

/// `(|δ∇A + d tr A|, |scal - 4(tr A)² + 4 tr A²|)` at one point.
pub fn constraint_residuals(a: &SymEndField, x: &SpherePoint) -> (f64, f64) {
    let n = x.dim();
    let frame = x.frame();
    let p = x.projector();
    let mut delta = DVector::zeros(n + 1);
    for i in 0..n {
        let e = frame.column(i).into_owned();
        delta -= a.covariant_derivative(x, &e) * &e;
    }
    let tr = PolyField::scalar(a.trace());
    let dtr = &p * DVector::from_row_slice(tr.jet(x.as_slice()).jacobian.as_slice());
    let amat = a.eval(x.as_slice());
    let t = amat.trace();
    let t2 = (&amat * &amat).trace();
    ((delta + dtr).norm(), (scalar_curvature(n) - 4.0 * t * t + 4.0 * t2).abs())
}

/// Max over frame pairs of the curvature equation residual
/// `[(∇_{E_i}A)E_j - (∇_{E_j}A)E_i]·ψ - 2(AE_i ∧ AE_j)·ψ - ½ℛ(E_i∧E_j)·ψ`, `ℛ = -Id`.
pub fn curvature_residual(psi: &dyn SpinorSection, a: &SymEndField, x: &SpherePoint) -> f64 {
    let frame = x.frame();
    let n = frame.ncols();
    let pt = x.as_slice();
    let v = psi.value(pt);
    let model = psi.model();
    let amat = a.eval(pt);
    let nab: Vec<DMatrix<f64>> = (0..n).map(|i| a.covariant_derivative(x, &frame.column(i).into_owned())).collect();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let ei = frame.column(i).into_owned();
            let ej = frame.column(j).into_owned();
            let lhs_vec = &nab[i] * &ej - &nab[j] * &ei;
            let lhs = model.cliff(pt, lhs_vec.as_slice(), v.as_slice());
            let aei = &amat * &ei;
            let aej = &amat * &ej;
            let quad = model.two_form(pt, aei.as_slice(), aej.as_slice(), v.as_slice());
            let curv = model.two_form(pt, ei.as_slice(), ej.as_slice(), v.as_slice());
            worst = worst.max((lhs - quad * 2.0 + curv * 0.5).norm());
        }
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct GksReport {
    pub residual_gks: f64,
    pub residual_constraint1: f64,
    pub residual_constraint2: f64,
    pub residual_curvature: f64,
    pub residual_unit: f64,
    /// Eigenvalues of the extracted `A` at each sample.
    pub spectrum: Vec<Vec<f64>>,
    pub samples: usize,
    pub seed: u64,
    pub path: &'static str,
    pub tolerance: f64,
}

impl GksReport {
    pub fn checks(&self, prefix: &str) -> Vec<Check> {
        let t = self.tolerance;
        vec![
            Check::at_most(format!("{prefix}unit_length"), self.residual_unit, tol::UNIT_SPINOR),
            Check::at_most(format!("{prefix}gks_equation"), self.residual_gks, t),
            Check::at_most(format!("{prefix}constraint_divergence"), self.residual_constraint1, t),
            Check::at_most(format!("{prefix}constraint_scalar"), self.residual_constraint2, t),
            Check::at_most(format!("{prefix}curvature_equation"), self.residual_curvature, t),
        ]
    }

    pub fn pass(&self) -> bool {
        self.checks("").iter().all(|c| c.pass)
    }

    /// Max distance of each sampled spectrum from `expected` (sorted ascending).
    pub fn spectrum_deviation(&self, expected: &[f64]) -> f64 {
        let mut e = expected.to_vec();
        e.sort_by(|a, b| a.total_cmp(b));
        self.spectrum
            .iter()
            .map(|s| {
                if s.len() != e.len() {
                    return f64::INFINITY;
                }
                s.iter().zip(&e).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Run the generalized Killing equation, the constraints and the curvature equation over seeded samples.
/// Non-unit spinors are reported through `residual_unit` rather than rejected.
pub fn verify_gks(psi: &dyn SpinorSection, a: &SymEndField, samples: usize, seed: u64) -> Result<GksReport> {
    let n = psi.model().n();
    if a.ambient_dim() != n + 1 {
        return Err(GksError::DimensionMismatch { expected: n + 1, got: a.ambient_dim() });
    }
    let points: Vec<SpherePoint> = sampling::sphere_points(n + 1, samples, seed)
        .into_iter()
        .map(SpherePoint::normalized)
        .collect();
    let per_point: Vec<PointResiduals> = points
        .par_iter()
        .map(|x| -> Result<PointResiduals> {
            let (gks, unit) = gks_at(psi, a, x)?;
            let (c1, c2) = constraint_residuals(a, x);
            let spectrum = match extract_a(psi, x) {
                Ok(e) => e.eigenvalues,
                Err(_) => Vec::new(),
            };
            Ok(PointResiduals { gks, constraint1: c1, constraint2: c2, curvature: curvature_residual(psi, a, x), unit, spectrum })
        })
        .collect::<Result<_>>()?;
    let fold = |f: fn(&PointResiduals) -> f64| per_point.iter().map(f).fold(0.0, f64::max);
    let path = psi.path();
    Ok(GksReport {
        residual_gks: fold(|p| p.gks),
        residual_constraint1: fold(|p| p.constraint1),
        residual_constraint2: fold(|p| p.constraint2),
        residual_curvature: fold(|p| p.curvature),
        residual_unit: fold(|p| p.unit),
        spectrum: per_point.into_iter().map(|p| p.spectrum).collect(),
        samples,
        seed,
        path: path.label(),
        tolerance: path.tolerance(),
    })
}

/// The generalized Killing equation alone; rejects non-unit spinors.
pub fn check_gks(psi: &dyn SpinorSection, a: &SymEndField, samples: usize, seed: u64) -> Result<Check> {
    let n = psi.model().n();
    let mut worst = 0.0f64;
    for x in sampling::sphere_points(n + 1, samples, seed) {
        worst = worst.max(gks_residual(psi, a, &SpherePoint::normalized(x))?);
    }
    Ok(Check::at_most("gks_equation", worst, psi.path().tolerance()))
}

/// Largest eigenvalue count tolerance used when grouping spectra.
pub const SPECTRUM_TOL: f64 = 1e-6;

/// Residuals of the chirality pipeline on `S^{8k}`.
#[derive(Clone, Debug, Serialize)]
pub struct EtaReport {
    pub k: usize,
    pub chirality_swap: f64,
    pub dh: f64,
    pub deta: f64,
    pub a1: f64,
    pub a2: f64,
    pub a_eta: f64,
    pub a_squared: f64,
    pub eta_zero_fraction: f64,
    pub max_gram_condition: f64,
    pub samples: usize,
    pub seed: u64,
}

impl EtaReport {
    pub fn checks(&self) -> Vec<Check> {
        let t = tol::EXACT;
        vec![
            Check::at_most("chirality_swap", self.chirality_swap, t),
            Check::at_most("dh_equals_2A_eta", self.dh, t),
            Check::at_most("nabla_eta", self.deta, t),
            Check::at_most("A2_eta", self.a1, t),
            Check::at_most("A3_eta", self.a2, t),
            Check::at_most("A_eta_proportional", self.a_eta, t),
            Check::at_most("a_squared_16k2", self.a_squared, t),
        ]
    }
}

/// Threshold below which `η` is treated as vanishing.
pub const ETA_ZERO: f64 = 1e-6;

pub struct ChiralityFields {
    pub plus: SpinorField,
    pub minus: SpinorField,
    /// `η_a(x) = ⟨e_a·x·ψ⁺, ψ⁻⟩`, tangent on the sphere.
    pub eta: PolyField,
    /// `h = |ψ⁻|²`.
    pub h: Poly,
}

/// Split a polynomial spinor on `S^{8k}` into chirality components.
pub fn chirality_fields(psi: &SpinorField) -> Result<ChiralityFields> {
    let model = psi.shared_model().clone();
    let n = model.n();
    if n == 0 || !n.is_multiple_of(8) {
        return Err(GksError::OutOfRange { what: "n", value: n as i64, range: "multiples of 8" });
    }
    let vol = model.sphere_volume_field();
    let vpsi = apply_matrix_field(&vol, psi.poly());
    let plus = SpinorField::new(model.clone(), psi.poly().add(&vpsi).scale(0.5))?;
    let minus = SpinorField::new(model.clone(), psi.poly().sub(&vpsi).scale(0.5))?;
    let m = n + 1;
    let xplus = apply_vector_field(model.rep(), &PolyField::position(m), plus.poly());
    let eta_comps = (0..m)
        .map(|a| {
            let mut e = PolyField::zeros(m, vec![m], ValueKind::Vector).comps().to_vec();
            e[a] = Poly::constant(m, 1.0);
            let ea = PolyField::vector(m, e);
            apply_vector_field(model.rep(), &ea, &xplus).dot(minus.poly())
        })
        .collect();
    let h = minus.norm_squared();
    Ok(ChiralityFields { plus, minus, eta: PolyField::vector(m, eta_comps), h })
}

pub fn eta_pipeline(psi: &SpinorField, a: &SymEndField, samples: usize, seed: u64) -> Result<EtaReport> {
    let fields = chirality_fields(psi)?;
    let model = psi.model();
    let n = model.n();
    let k = n / 8;
    let kf = k as f64;
    let points: Vec<SpherePoint> = sampling::sphere_points(n + 1, samples, seed)
        .into_iter()
        .map(SpherePoint::normalized)
        .collect();
    let hfield = PolyField::scalar(fields.h.clone());
    let rows: Vec<[f64; 9]> = points
        .par_iter()
        .map(|x| -> Result<[f64; 9]> {
            let pt = x.as_slice();
            let frame = x.frame();
            let p = x.projector();
            let amat = a.eval(pt);
            let (vp, np) = covariant_derivatives(&fields.plus, pt, &frame);
            let (vm, nm) = covariant_derivatives(&fields.minus, pt, &frame);
            check_unit(&(&vp + &vm))?;
            let ae = &amat * &frame;
            let swap_p = max_col_norm(&(np - cliff_columns(&fields.plus, pt, &ae, &vm)));
            let swap_m = max_col_norm(&(nm - cliff_columns(&fields.plus, pt, &ae, &vp)));
            let eta_jet = fields.eta.jet(pt);
            let eta = &p * DVector::from_vec(eta_jet.value.clone());
            let aeta = &amat * &eta;
            let hj = hfield.jet(pt);
            let h = hj.value[0];
            let dh_amb = DVector::from_row_slice(hj.jacobian.as_slice());
            let dh = (frame.transpose() * (dh_amb - &aeta * 2.0)).amax();
            let deta_m = &p * (&eta_jet.jacobian * &frame);
            let deta = (deta_m - &ae * (1.0 - 2.0 * h)).amax();
            let tr = amat.trace();
            let a2 = &amat * &aeta;
            let a3 = &amat * &a2;
            let r1 = (&a2 - &aeta * tr + &eta * ((8.0 * kf - 1.0) / 4.0)).norm();
            let c2 = tr * tr - 2.0 * kf * (8.0 * kf - 1.0) + 0.25;
            let r2 = (&a3 - &aeta * c2 + &eta * (tr / 4.0)).norm();
            let r3 = (&aeta - &eta * (tr / (8.0 * kf))).norm();
            let eta_norm = eta.norm();
            let asq = if eta_norm > ETA_ZERO { (tr * tr - 16.0 * kf * kf).abs() } else { 0.0 };
            let gram_cond = if vp.norm() > ETA_ZERO {
                let b = cliff_columns(&fields.plus, pt, &frame, &vp);
                condition_number(&(b.transpose() * b))
            } else {
                0.0
            };
            Ok([swap_p.max(swap_m), dh, deta, r1, r2, r3, asq, (eta_norm <= ETA_ZERO) as u8 as f64, gram_cond])
        })
        .collect::<Result<_>>()?;
    let col = |i: usize| rows.iter().map(|r| r[i]).fold(0.0, f64::max);
    let zero_count: f64 = rows.iter().map(|r| r[7]).sum();
    Ok(EtaReport {
        k,
        chirality_swap: col(0),
        dh: col(1),
        deta: col(2),
        a1: col(3),
        a2: col(4),
        a_eta: col(5),
        a_squared: col(6),
        eta_zero_fraction: zero_count / samples.max(1) as f64,
        max_gram_condition: col(8),
        samples,
        seed,
    })
}

/// Derivative of `4(tr A)² - 4 tr A²` along `A_t` at `A = ½Id`; it equals
/// `4(n-1) tr Ȧ`, so a constant scalar curvature forces `tr Ȧ = 0`.
pub fn linearized_scalar_constraint(n: usize, adot: &DMatrix<f64>) -> f64 {
    let a = DMatrix::identity(n, n) * 0.5;
    8.0 * a.trace() * adot.trace() - 8.0 * (&a * adot).trace()
}

pub fn path_tolerance(path: DerivativePath) -> f64 {
    path.tolerance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinor::{killing_basis, KillingSign, Normalized, SpinorModel};

    #[test]
    fn killing_spinor_has_a_half_identity() {
        let model = SpinorModel::shared(3).unwrap();
        let psi = &killing_basis(&model, KillingSign::Plus)[0];
        let a = SymEndField::scalar(4, 0.5);
        let rep = verify_gks(psi, &a, 10, 0).unwrap();
        assert!(rep.pass(), "{rep:?}");
        assert!(rep.spectrum_deviation(&[0.5, 0.5, 0.5]) < 1e-9);
        let wrong = SymEndField::scalar(4, -0.5);
        let bad = verify_gks(psi, &wrong, 10, 0).unwrap();
        assert!(bad.residual_gks > 0.5);
    }

    #[test]
    fn minus_family_extracts_minus_half() {
        let model = SpinorModel::shared(7).unwrap();
        let psi = &killing_basis(&model, KillingSign::Minus)[3];
        let x = SpherePoint::normalized(DVector::from_fn(8, |i, _| i as f64 - 3.3));
        let e = extract_a(psi, &x).unwrap().ensure(1e-9).unwrap();
        assert!(e.eigenvalues.iter().all(|l| (l + 0.5).abs() < 1e-9));
    }

    #[test]
    fn constraint_substitution_values() {
        // a² - tr A² for the S³ and S⁷ spectra
        for (n, spectrum) in [(3usize, vec![0.5, -1.5, -1.5]), (7, vec![0.5, 0.5, 0.5, -1.5, -1.5, -1.5, -1.5])] {
            let a: f64 = spectrum.iter().sum();
            let a2: f64 = spectrum.iter().map(|l| l * l).sum();
            assert!((a * a - a2 - (n * (n - 1)) as f64 / 4.0).abs() < 1e-14);
        }
        let x = SpherePoint::normalized(DVector::from_column_slice(&[0.1, 0.2, 0.3, 0.9]));
        let (c1, c2) = constraint_residuals(&SymEndField::scalar(4, 0.5), &x);
        assert!(c1 < 1e-14 && c2 < 1e-13);
    }

    #[test]
    fn non_unit_spinor_is_rejected() {
        let model = SpinorModel::shared(3).unwrap();
        let psi = killing_basis(&model, KillingSign::Plus)[0].scale(2.0);
        assert!(matches!(
            check_gks(&psi, &SymEndField::scalar(4, 0.5), 3, 0),
            Err(GksError::NotUnit(_))
        ));
    }

    #[test]
    fn mixed_spinor_is_not_generalized_killing() {
        let model = SpinorModel::shared(3).unwrap();
        let plus = killing_basis(&model, KillingSign::Plus);
        let minus = killing_basis(&model, KillingSign::Minus);
        let mix = Normalized(plus[0].add(&minus[1].scale_by(&Poly::var(4, 0))));
        let worst = sampling::sphere_points(4, 20, 1)
            .into_iter()
            .map(|x| extract_a(&mix, &SpherePoint::normalized(x)).unwrap().residual())
            .fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }

    #[test]
    fn eta_pipeline_for_a_killing_spinor_on_s8() {
        let model = SpinorModel::shared(8).unwrap();
        let psi = &killing_basis(&model, KillingSign::Plus)[0];
        let rep = eta_pipeline(psi, &SymEndField::scalar(9, 0.5), 10, 0).unwrap();
        for c in rep.checks() {
            assert!(c.pass, "{c:?}");
        }
        assert!(rep.eta_zero_fraction < 1.0);
        assert!((rep.max_gram_condition - 1.0).abs() < 1e-9);
    }

    #[test]
    fn linearized_trace_condition() {
        let adot = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 2.0, 3.0, 1.0, 0.0, 1.0, -0.5]);
        let d = linearized_scalar_constraint(3, &adot);
        assert!((d - 4.0 * 2.0 * adot.trace()).abs() < 1e-13);
    }
}
