//! The two-eigenvalue example on `S³`: `ψ = ξ·Φ` for a unit Hopf field `ξ`
//! and a Killing spinor `Φ`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::clifford::{cayley_dickson_left, cayley_dickson_right};
use crate::error::{GksError, Result};
use crate::field::PolyField;
use crate::gks::{extract_a, SymEndField};
use crate::sphere::{killing_field_from_skew, SkewMatrix, SpherePoint};
use crate::spinor::{SpinorField, SpinorModel};

pub struct S3Example {
    pub model: Arc<SpinorModel>,
    pub f: SkewMatrix,
    /// The constant (`+½` Killing) spinor.
    pub phi: DVector<f64>,
    pub psi: SpinorField,
    /// `2ξξᵀ - 3/2 (I - x xᵀ)`: `½` on `ξ`, `-3/2` on `ξ^⊥ ∩ T S³`.
    pub a: SymEndField,
}

fn build(model: &Arc<SpinorModel>, f: &SkewMatrix, phi: &DVector<f64>) -> Result<SpinorField> {
    let xi = killing_field_from_skew(f);
    SpinorField::constant(model.clone(), phi).map(|c| c.cliff_by_field(&xi))
}

/// `2 Σ ξ_i ξ_iᵀ - 3/2 (I - x xᵀ)` for linear fields `ξ_i = F_i x`.
pub fn two_eigen_endomorphism(fs: &[&DMatrix<f64>]) -> SymEndField {
    let m = fs[0].nrows();
    let mut a = PolyField::tangent_projector(m).scale(-1.5);
    for f in fs {
        let xi = PolyField::linear_vector(f);
        a = a.axpy(2.0, &xi.outer(&xi));
    }
    SymEndField::new(a).expect("square")
}

/// Builds `ψ` from `Φ = ` the `k`-th basis spinor. `F` is left or right
/// quaternion multiplication by `i`, whichever does not give a Killing spinor
/// (the spectrum of `A` at a probe point is not constant).
pub fn s3_example_with(k: usize) -> Result<S3Example> {
    let model = SpinorModel::shared(3)?;
    if k >= model.dim() {
        return Err(GksError::OutOfRange { what: "k", value: k as i64, range: "0..4" });
    }
    let phi = model.basis().column(k).into_owned();
    let probe = SpherePoint::normalized(DVector::from_column_slice(&[0.3, -0.5, 0.7, 0.4]));
    let candidates = [cayley_dickson_left(4, 1).to_dense(), cayley_dickson_right(4, 1).to_dense()];
    let fmat = candidates
        .into_iter()
        .find(|f| {
            let Ok(skew) = SkewMatrix::new(f.clone()) else { return false };
            let Ok(psi) = build(&model, &skew, &phi) else { return false };
            match extract_a(&psi, &probe) {
                Ok(e) => e.residual() < 1e-10 && e.eigenvalues.iter().any(|&ev| (ev + 1.5).abs() < 1e-8),
                Err(_) => false,
            }
        })
        .ok_or_else(|| GksError::Malformed("neither quaternion structure gives a two-eigenvalue spinor".into()))?;
    let a = two_eigen_endomorphism(&[&fmat]);
    let f = SkewMatrix::new(fmat)?;
    let psi = build(&model, &f, &phi)?;
    Ok(S3Example { model, f, phi, psi, a })
}

pub fn s3_example() -> Result<S3Example> {
    s3_example_with(0)
}
