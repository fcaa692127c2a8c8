//! The Clifford module structure `ρ` on `T^μ` induced by `T^λ` for a
//! two-eigenvalue generalized Killing spinor.
//!
//! For `V ∈ T^λ`, `ρ_V(X) := -(∇_X V)^μ`; then `X·V·ψ = ρ_V(X)·ψ` and
//! `ρ_V ∘ ρ_V = -|V|² Id` on `T^μ`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{GksError, Result};
use crate::field::PolyField;
use crate::gks::SymEndField;
use crate::linalg::orthonormal_column_basis;
use crate::report::{tol, Check};
use crate::sampling;
use crate::sphere::SpherePoint;
use crate::spinor::SpinorSection;

#[derive(Clone, Debug, Serialize)]
pub struct RhoReport {
    pub clifford_relation: f64,
    pub square: f64,
    pub samples: usize,
    pub seed: u64,
}

impl RhoReport {
    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::at_most("rho_clifford_relation", self.clifford_relation, tol::RHO_MODULE),
            Check::at_most("rho_square", self.square, tol::RHO_MODULE),
        ]
    }
}

/// Orthogonal projector field onto the `λ`-eigendistribution: `(A - μ P_T)/(λ - μ)`.
pub fn eigen_projector(a: &SymEndField, lambda: f64, mu: f64) -> PolyField {
    let p = PolyField::tangent_projector(a.ambient_dim());
    a.poly().axpy(-mu, &p).scale(1.0 / (lambda - mu))
}

fn check_two_eigen(amat: &DMatrix<f64>, x: &SpherePoint, lambda: f64, mu: f64) -> Result<()> {
    let frame = x.frame();
    let restricted = frame.transpose() * amat * &frame;
    for ev in crate::linalg::sym_eigenvalues(&restricted) {
        if (ev - lambda).abs() > 1e-6 && (ev - mu).abs() > 1e-6 {
            return Err(GksError::NotTwoEigenvalue(format!("eigenvalue {ev} is neither {lambda} nor {mu}")));
        }
    }
    Ok(())
}

pub fn rho_module_check(
    psi: &dyn SpinorSection,
    a: &SymEndField,
    lambda: f64,
    mu: f64,
    samples: usize,
    seed: u64,
) -> Result<RhoReport> {
    let n = psi.model().n();
    let pi_l = eigen_projector(a, lambda, mu);
    let mut rng = sampling::substream(seed, 7);
    let mut relation = 0.0f64;
    let mut square = 0.0f64;
    for _ in 0..samples {
        let x = SpherePoint::sample(&mut rng, n);
        let pt = x.as_slice();
        let amat = a.eval(pt);
        check_two_eigen(&amat, &x, lambda, mu)?;
        let p = x.projector();
        let pl = pi_l.eval_matrix(pt);
        let pm = &p - &pl;
        // V = Π_λ v₀ for a random constant v₀
        let v0 = sampling::gaussian_vector(&mut rng, n + 1);
        let vfield = pi_l.mat_vec(&PolyField::constant_vector(&v0));
        let vjet = vfield.jet(pt);
        let v = DVector::from_vec(vjet.value);
        let tmu = orthonormal_column_basis(&pm, 1e-8);
        if tmu.ncols() == 0 {
            return Err(GksError::NotTwoEigenvalue("empty μ-eigenspace".into()));
        }
        // ρ_V as an ambient matrix on T^μ: X ↦ -Π_μ P_T (D_X V)
        let rho = -(&pm * &p * &vjet.jacobian) * &pm;
        let value = psi.value(pt);
        let model = psi.model();
        let cv = model.cliff(pt, v.as_slice(), value.as_slice());
        for col in tmu.column_iter() {
            let xv = col.into_owned();
            let lhs = model.cliff(pt, xv.as_slice(), cv.as_slice());
            let rhs = model.cliff(pt, (&rho * &xv).as_slice(), value.as_slice());
            relation = relation.max((lhs - rhs).norm());
        }
        let r = tmu.transpose() * &rho * &tmu;
        let k = r.nrows();
        let sq = &r * &r + DMatrix::identity(k, k) * v.norm_squared();
        square = square.max(sq.amax());
    }
    Ok(RhoReport { clifford_relation: relation, square, samples, seed })
}
