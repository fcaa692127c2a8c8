//! The canonical spinor of the 3-Sasakian sphere `S⁷`, built on the
//! hyperkähler cone `ℝ⁸ = ℍ²`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;

use crate::clifford::cayley_dickson_right;
use crate::error::{GksError, Result};
use crate::field::PolyField;
use crate::gks::SymEndField;
use crate::linalg::{null_space, rank};
use crate::sampling;
use crate::sphere::{projector, SpherePoint};
use crate::spinor::{covariant_derivatives, SpinorField, SpinorModel, SpinorSection};

use super::s3::two_eigen_endomorphism;

/// Right multiplication by `i, j` on each quaternion factor of `ℍ²`, and their product.
#[derive(Clone, Debug)]
pub struct QuaternionicStructure {
    pub j: [DMatrix<f64>; 3],
}

fn block_diag(b: &DMatrix<f64>) -> DMatrix<f64> {
    let k = b.nrows();
    let mut m = DMatrix::zeros(2 * k, 2 * k);
    m.view_mut((0, 0), (k, k)).copy_from(b);
    m.view_mut((k, k), (k, k)).copy_from(b);
    m
}

impl QuaternionicStructure {
    pub fn standard() -> Self {
        let j1 = block_diag(&cayley_dickson_right(4, 1).to_dense());
        let j2 = block_diag(&cayley_dickson_right(4, 2).to_dense());
        let j3 = &j1 * &j2;
        QuaternionicStructure { j: [j1, j2, j3] }
    }

    /// Max of `‖J_i² + I‖`, `‖J_iJ_j + J_jJ_i‖`, `‖J_1J_2 - J_3‖`, `‖J_i + J_iᵀ‖`.
    pub fn defect(&self) -> f64 {
        let id = DMatrix::<f64>::identity(8, 8);
        let mut worst = (&self.j[0] * &self.j[1] - &self.j[2]).amax();
        for a in 0..3 {
            worst = worst.max((&self.j[a] * &self.j[a] + &id).amax());
            worst = worst.max((&self.j[a] + self.j[a].transpose()).amax());
            for b in (a + 1)..3 {
                worst = worst.max((&self.j[a] * &self.j[b] + &self.j[b] * &self.j[a]).amax());
            }
        }
        worst
    }

    /// Projection onto the commutant of `{J_1, J_2, J_3}`.
    pub fn commutant_projection(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = m.clone();
        for j in &self.j {
            out -= j * m * j;
        }
        out / 4.0
    }

    /// Elementary 2-forms projected onto the commutant: a spanning set of `𝔰𝔭(2)`.
    pub fn sp2_forms(&self) -> Vec<DMatrix<f64>> {
        let mut out = Vec::new();
        for a in 0..8 {
            for b in (a + 1)..8 {
                let mut e = DMatrix::zeros(8, 8);
                e[(a, b)] = 1.0;
                e[(b, a)] = -1.0;
                let p = self.commutant_projection(&e);
                if p.amax() > 1e-12 {
                    out.push(p);
                }
            }
        }
        out
    }

    pub fn sp2_dimension(&self) -> usize {
        let forms = self.sp2_forms();
        let cols: Vec<DVector<f64>> = forms.iter().map(|f| DVector::from_column_slice(f.as_slice())).collect();
        rank(&DMatrix::from_columns(&cols), 1e-9)
    }

    /// Kähler form of `J_1` as a skew matrix: `Ω_1(X, Y) = g(J_1 X, Y)`.
    pub fn kahler_form(&self) -> DMatrix<f64> {
        -&self.j[0]
    }
}

#[derive(Clone, Debug)]
pub struct Psi1 {
    pub spinor: DVector<f64>,
    /// Joint kernel of the `𝔰𝔭(2)` actions in `Σ₈⁺`.
    pub sp2_kernel_dim: usize,
    /// After adding the Kähler form.
    pub kernel_dim: usize,
}

fn joint_kernel(basis: &DMatrix<f64>, ops: &[DMatrix<f64>]) -> DMatrix<f64> {
    let d = basis.ncols();
    let rows: usize = ops.iter().map(|o| o.nrows()).sum();
    let mut stack = DMatrix::zeros(rows, d);
    let mut r = 0;
    for o in ops {
        stack.view_mut((r, 0), (o.nrows(), d)).copy_from(&(o * basis));
        r += o.nrows();
    }
    basis * null_space(&stack, 1e-8)
}

/// The unit spinor in `Σ₈⁺` killed by `𝔰𝔭(2)` and by the Kähler form of `J_1`.
pub fn solve_psi1(model: &SpinorModel, q: &QuaternionicStructure) -> Result<Psi1> {
    if model.n() != 7 {
        return Err(GksError::OutOfRange { what: "n", value: model.n() as i64, range: "7" });
    }
    let rep = model.rep();
    let mut ops: Vec<DMatrix<f64>> = q.sp2_forms().iter().map(|f| rep.bivector_action(f)).collect::<Result<_>>()?;
    let k3 = joint_kernel(model.basis(), &ops);
    ops.push(rep.bivector_action(&q.kahler_form())?);
    let k1 = joint_kernel(model.basis(), &ops);
    if k1.ncols() != 1 {
        return Err(GksError::KernelDimension { expected: 1, got: k1.ncols() });
    }
    let mut s = k1.column(0).normalize();
    if let Some(&first) = s.iter().find(|c| c.abs() > 1e-9) {
        if first < 0.0 {
            s = -s;
        }
    }
    Ok(Psi1 { spinor: s, sp2_kernel_dim: k3.ncols(), kernel_dim: 1 })
}

pub struct CanonicalS7 {
    pub model: Arc<SpinorModel>,
    pub q: QuaternionicStructure,
    pub psi1: Psi1,
    /// `ψ₀(x) = x·(J_1 x)·Ψ_1`.
    pub psi0: SpinorField,
    /// `½` on `span{ξ_i}`, `-3/2` on the complement.
    pub a: SymEndField,
}

pub fn canonical_s7() -> Result<CanonicalS7> {
    let model = SpinorModel::shared(7)?;
    let q = QuaternionicStructure::standard();
    let psi1 = solve_psi1(&model, &q)?;
    let xi1 = PolyField::linear_vector(&q.j[0]);
    let psi0 = SpinorField::constant(model.clone(), &psi1.spinor)?
        .mul_vector_field(&xi1)
        .mul_vector_field(&PolyField::position(8));
    let a = two_eigen_endomorphism(&[&q.j[0], &q.j[1], &q.j[2]]);
    Ok(CanonicalS7 { model, q, psi1, psi0, a })
}

impl CanonicalS7 {
    /// `|(x∧ξ_1 - ξ_2∧ξ_3)·Ψ_1|` at `x`.
    pub fn sp2_form_defect(&self, x: &DVector<f64>) -> Result<f64> {
        let rep = self.model.rep();
        let xi: Vec<DVector<f64>> = self.q.j.iter().map(|j| j * x).collect();
        let w = rep.two_form_action(x.as_slice(), xi[0].as_slice())? - rep.two_form_action(xi[1].as_slice(), xi[2].as_slice())?;
        Ok((w * &self.psi1.spinor).norm())
    }

    /// Cone-level lemma `∇̄_X Ψ₀ = Ā(X)·x·Ψ₀` for all `X ∈ ℝ⁸`, where
    /// `Ψ₀ = x·ξ_1·Ψ_1/|x|²` and `Ā` is `0` on `⟨x, ξ_i⟩`, `-2` on the complement.
    pub fn cone_residual(&self, x: &SpherePoint) -> f64 {
        let pt = x.as_slice();
        let jet = self.psi0.poly().jet(pt);
        let value = DVector::from_vec(jet.value);
        let mut comp = projector(x.vector());
        for j in &self.q.j {
            let v = j * x.vector();
            comp -= &v * v.transpose();
        }
        let abar = comp * -2.0;
        let rep = self.model.rep();
        let xpsi = rep.apply_vector(pt, value.as_slice());
        (0..8)
            .map(|a| {
                // quotient rule for 1/|x|² at |x| = 1
                let d = jet.jacobian.column(a) - &value * (2.0 * pt[a]);
                let rhs = rep.apply_vector(abar.column(a).as_slice(), xpsi.as_slice());
                (d - rhs).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Max over `i` and frame vectors of the distance of
    /// `(∇_X - ½c(X))(c(ξ_i)ψ₀)` from `span{c(ξ_j)ψ₀}`.
    pub fn modified_connection_residual(&self, x: &SpherePoint) -> f64 {
        let pt = x.as_slice();
        let frame = x.frame();
        let v = self.psi0.value(pt);
        let span: Vec<DVector<f64>> = self
            .q
            .j
            .iter()
            .map(|j| self.model.cliff(pt, (j * x.vector()).as_slice(), v.as_slice()))
            .collect();
        let mut worst = 0.0f64;
        for j in &self.q.j {
            let phi = self.psi0.cliff_by_field(&PolyField::linear_vector(j));
            let (pv, nab) = covariant_derivatives(&phi, pt, &frame);
            for (i, col) in frame.column_iter().enumerate() {
                let mut t = nab.column(i) - self.model.cliff(pt, col.as_slice(), pv.as_slice()) * 0.5;
                for b in &span {
                    let c = b.dot(&t);
                    t.axpy(-c, b, 1.0);
                }
                worst = worst.max(t.norm());
            }
        }
        worst
    }

    /// Max of `| |ξ_i| - 1 |` and the Killing defect of `ξ_i` over samples.
    pub fn sasakian_field_defect(&self, rng: &mut ChaCha8Rng, samples: usize) -> Result<f64> {
        let mut worst = self.q.defect();
        for _ in 0..samples {
            let x = SpherePoint::sample(rng, 7);
            for j in &self.q.j {
                let xi = PolyField::linear_vector(j);
                worst = worst.max(((j * x.vector()).norm() - 1.0).abs());
                worst = worst.max(crate::sphere::killing_defect(&x, &xi)?);
            }
        }
        Ok(worst)
    }
}

pub fn sample_points(samples: usize, seed: u64) -> Vec<SpherePoint> {
    sampling::sphere_points(8, samples, seed).into_iter().map(SpherePoint::normalized).collect()
}
