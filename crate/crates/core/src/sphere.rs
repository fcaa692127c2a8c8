//! The unit sphere `Sⁿ ⊂ ℝ^{n+1}`: tangency, Levi-Civita derivatives by ambient
//! projection, curvature, and Killing fields from skew matrices.
//!
//! Curvature convention: `R_{X,Y} = [∇_X, ∇_Y] - ∇_{[X,Y]}`, so on the round
//! sphere `R_{Y,X}Z = g(X,Z)Y - g(Y,Z)X`. The inner product on 2-forms is
//! `g(a∧b, c∧d) = g(a,c)g(b,d) - g(a,d)g(b,c)`.

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;

use crate::error::{GksError, Result};
use crate::field::PolyField;
use crate::report::tol;
use crate::sampling;

const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SpherePoint {
    x: DVector<f64>,
}

impl SpherePoint {
    pub fn new(x: DVector<f64>) -> Result<Self> {
        let n = x.norm();
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(GksError::NotOnSphere(n));
        }
        Ok(SpherePoint { x })
    }

    /// Normalize a nonzero ambient vector.
    pub fn normalized(v: DVector<f64>) -> Self {
        let n = v.norm();
        SpherePoint { x: v / n }
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        SpherePoint::new(DVector::from_column_slice(v))
    }

    pub fn ambient_dim(&self) -> usize {
        self.x.len()
    }

    /// Sphere dimension `n`.
    pub fn dim(&self) -> usize {
        self.x.len() - 1
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn as_slice(&self) -> &[f64] {
        self.x.as_slice()
    }

    pub fn projector(&self) -> DMatrix<f64> {
        projector(&self.x)
    }

    pub fn tangent_project(&self, v: &DVector<f64>) -> DVector<f64> {
        tangent_project(&self.x, v)
    }

    pub fn check_tangent(&self, v: &DVector<f64>) -> Result<()> {
        let d = v.dot(&self.x);
        if d.abs() > tol::TANGENCY * (1.0 + v.norm()) {
            return Err(GksError::NotTangent(d.abs()));
        }
        Ok(())
    }

    /// Deterministic oriented orthonormal tangent frame.
    pub fn frame(&self) -> DMatrix<f64> {
        standard_frame(&self.x)
    }

    pub fn sample(rng: &mut ChaCha8Rng, n: usize) -> Self {
        SpherePoint { x: sampling::sphere_point(rng, n + 1) }
    }
}

pub fn tangent_project(x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    v - x * v.dot(x)
}

/// `I - x xᵀ`.
pub fn projector(x: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::identity(x.len(), x.len()) - x * x.transpose()
}

fn orient(x: &DVector<f64>, mut frame: DMatrix<f64>) -> DMatrix<f64> {
    let n = frame.ncols();
    let mut full = DMatrix::zeros(x.len(), n + 1);
    full.set_column(0, x);
    full.columns_mut(1, n).copy_from(&frame);
    if full.determinant() < 0.0 {
        let last = -frame.column(n - 1);
        frame.set_column(n - 1, &last);
    }
    frame
}

/// Gram–Schmidt on the projected standard basis, dropping the coordinate axis
/// most parallel to `x` (lowest index on ties); oriented so `det[x, E] > 0`.
pub fn standard_frame(x: &DVector<f64>) -> DMatrix<f64> {
    let m = x.len();
    let drop = (0..m).fold(0, |best, a| if x[a].abs() > x[best].abs() { a } else { best });
    let p = projector(x);
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(m - 1);
    for a in (0..m).filter(|&a| a != drop) {
        let mut v = p.column(a).into_owned();
        for _ in 0..2 {
            for c in &cols {
                let d = c.dot(&v);
                v.axpy(-d, c, 1.0);
            }
        }
        let nv = v.norm();
        cols.push(v / nv);
    }
    orient(x, DMatrix::from_columns(&cols))
}

/// A random oriented orthonormal tangent frame at `x`.
pub fn random_frame(rng: &mut ChaCha8Rng, x: &DVector<f64>) -> DMatrix<f64> {
    let m = x.len();
    let mut g = DMatrix::zeros(m, m);
    g.set_column(0, x);
    for a in 1..m {
        g.set_column(a, &sampling::gaussian_vector(rng, m));
    }
    let q = g.qr().q();
    let mut frame = q.columns(1, m - 1).into_owned();
    for j in 0..m - 1 {
        let v = tangent_project(x, &frame.column(j).into_owned());
        frame.set_column(j, &(v.normalize()));
    }
    orient(x, frame)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix {
    f: DMatrix<f64>,
}

impl SkewMatrix {
    pub fn new(f: DMatrix<f64>) -> Result<Self> {
        if !f.is_square() {
            return Err(GksError::DimensionMismatch { expected: f.nrows(), got: f.ncols() });
        }
        let defect = (&f + f.transpose()).amax();
        if defect > 1e-12 {
            return Err(GksError::NotSkew(defect));
        }
        Ok(SkewMatrix { f })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.f
    }
}

/// `x ↦ F x`.
pub fn killing_field_from_skew(f: &SkewMatrix) -> PolyField {
    PolyField::linear_vector(f.matrix())
}

/// Exact ambient directional derivative of a field at `x`.
pub fn ambient_derivative(field: &PolyField, x: &[f64], dir: &DVector<f64>) -> DVector<f64> {
    field.jet(x).along(dir)
}

/// `∇_X Y = P_T(D_X Y)` for a field `Y` tangential on the sphere.
pub fn levi_civita_vec(x: &SpherePoint, xv: &DVector<f64>, y: &PolyField) -> Result<DVector<f64>> {
    x.check_tangent(xv)?;
    let jet = y.jet(x.as_slice());
    let value = DVector::from_vec(jet.value.clone());
    let normal = value.dot(x.vector());
    if normal.abs() > tol::TANGENCY * (1.0 + value.norm()) {
        return Err(GksError::NotTangential(normal.abs()));
    }
    Ok(x.tangent_project(&jet.along(xv)))
}

/// Polynomial field `P_T(D_X Y)`, with `P_T = I - x xᵀ` as a polynomial.
pub fn covariant_field(xf: &PolyField, y: &PolyField) -> PolyField {
    let p = PolyField::tangent_projector(y.nvars());
    p.mat_vec(&y.derivative_along(xf))
}

/// The tangential extension `y ↦ P_T(y) v` of a vector given at one point.
pub fn tangential_extension(v: &DVector<f64>) -> PolyField {
    let p = PolyField::tangent_projector(v.len());
    p.mat_vec(&PolyField::constant_vector(v))
}

/// `R_{Y,X} Z = [∇_Y, ∇_X] Z - ∇_{[Y,X]} Z` by exact differentiation.
pub fn curvature_vec(
    x: &SpherePoint,
    xv: &DVector<f64>,
    yv: &DVector<f64>,
    z: &PolyField,
) -> Result<DVector<f64>> {
    x.check_tangent(xv)?;
    x.check_tangent(yv)?;
    let xf = tangential_extension(xv);
    let yf = tangential_extension(yv);
    let nx_z = covariant_field(&xf, z);
    let ny_z = covariant_field(&yf, z);
    // [Y, X] = D_Y X - D_X Y
    let bracket = xf.derivative_along(&yf).sub(&yf.derivative_along(&xf));
    let pt = x.as_slice();
    let a = levi_like(&nx_z, x, yv);
    let b = levi_like(&ny_z, x, xv);
    let c = x.tangent_project(&z.jet(pt).along(&bracket.eval_vector(pt)));
    Ok(a - b - c)
}

fn levi_like(field: &PolyField, x: &SpherePoint, dir: &DVector<f64>) -> DVector<f64> {
    x.tangent_project(&field.jet(x.as_slice()).along(dir))
}

/// Closed form on the round sphere: `R_{Y,X}Z = g(X,Z)Y - g(Y,Z)X`.
pub fn sphere_curvature(xv: &DVector<f64>, yv: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
    yv * xv.dot(z) - xv * yv.dot(z)
}

/// `g(a∧b, c∧d)`.
pub fn two_form_inner(a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>, d: &DVector<f64>) -> f64 {
    a.dot(c) * b.dot(d) - a.dot(d) * b.dot(c)
}

/// `g(ℛ(X∧Y), U∧V) := g(R_{X,Y}U, V)`, computed from `curvature_vec`.
pub fn curvature_operator_2form(
    x: &SpherePoint,
    xv: &DVector<f64>,
    yv: &DVector<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<f64> {
    x.check_tangent(u)?;
    x.check_tangent(v)?;
    // R_{X,Y} = R_{Y',X'} with Y' = X, X' = Y.
    let r = curvature_vec(x, yv, xv, &tangential_extension(u))?;
    Ok(r.dot(v))
}

pub fn scalar_curvature(n: usize) -> f64 {
    (n * (n - 1)) as f64
}

/// Max over frame pairs of `|g(∇_{E_i}ξ, E_j) + g(∇_{E_j}ξ, E_i)|`.
pub fn killing_defect(x: &SpherePoint, xi: &PolyField) -> Result<f64> {
    let e = x.frame();
    let n = e.ncols();
    let d: Vec<DVector<f64>> = (0..n)
        .map(|i| levi_civita_vec(x, &e.column(i).into_owned(), xi))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let s = d[i].dot(&e.column(j)) + d[j].dot(&e.column(i));
            worst = worst.max(s.abs());
        }
    }
    Ok(worst)
}

/// Central difference of `f` along the great circle through `x` with velocity `dir`.
pub fn geodesic_difference(
    f: impl Fn(&[f64]) -> DVector<f64>,
    x: &DVector<f64>,
    dir: &DVector<f64>,
    step: f64,
) -> DVector<f64> {
    let speed = dir.norm();
    if speed == 0.0 {
        return f(x.as_slice()) * 0.0;
    }
    let u = dir / speed;
    let at = |t: f64| {
        let th = t * speed;
        x * th.cos() + &u * th.sin()
    };
    let plus = f(at(step).as_slice());
    let minus = f(at(-step).as_slice());
    (plus - minus) / (2.0 * step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{rng, tangent_vector};

    fn unit(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v).normalize()
    }

    #[test]
    fn projection_basics() {
        let x = unit(&[1.0, 2.0, 2.0]);
        assert!(tangent_project(&x, &x).norm() < 1e-15);
        let v = DVector::from_column_slice(&[2.0, -1.0, 0.0]);
        assert!((tangent_project(&x, &v) - &v).norm() < 1e-15);
    }

    #[test]
    fn rejects_points_off_sphere() {
        assert!(matches!(SpherePoint::from_slice(&[1.0, 1.0]), Err(GksError::NotOnSphere(_))));
    }

    #[test]
    fn frames_are_oriented_and_orthonormal() {
        let mut r = rng(1);
        for n in [2, 3, 7, 8] {
            let x = SpherePoint::sample(&mut r, n);
            for e in [x.frame(), random_frame(&mut r, x.vector())] {
                assert!((e.transpose() * &e - DMatrix::identity(n, n)).amax() < 1e-13);
                assert!((e.transpose() * x.vector()).amax() < 1e-13);
                let mut full = DMatrix::zeros(n + 1, n + 1);
                full.set_column(0, x.vector());
                full.columns_mut(1, n).copy_from(&e);
                assert!(full.determinant() > 0.0);
            }
        }
    }

    #[test]
    fn frame_at_a_pole_drops_that_axis() {
        let x = SpherePoint::from_slice(&[0.0, 0.0, 1.0]).unwrap();
        let e = x.frame();
        assert!((e.column(0) - DVector::from_column_slice(&[1.0, 0.0, 0.0])).norm() < 1e-15);
    }

    #[test]
    fn levi_civita_of_killing_field() {
        let f = SkewMatrix::new(DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 1.0, -2.0, -1.0, 0.0, 0.5, 2.0, -0.5, 0.0],
        ))
        .unwrap();
        let xi = killing_field_from_skew(&f);
        let mut r = rng(2);
        let x = SpherePoint::sample(&mut r, 2);
        let xv = tangent_vector(&mut r, x.vector());
        let got = levi_civita_vec(&x, &xv, &xi).unwrap();
        let fx = f.matrix() * &xv;
        let expect = &fx - x.vector() * fx.dot(x.vector());
        assert!((got - expect).norm() < 1e-14);
        assert!(killing_defect(&x, &xi).unwrap() < 1e-14);
    }

    #[test]
    fn non_tangential_field_is_flagged() {
        let x = SpherePoint::from_slice(&[1.0, 0.0]).unwrap();
        let pos = PolyField::position(2);
        let xv = DVector::from_column_slice(&[0.0, 1.0]);
        assert!(matches!(levi_civita_vec(&x, &xv, &pos), Err(GksError::NotTangential(_))));
        assert!(SkewMatrix::new(DMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn curvature_of_orthonormal_pair() {
        let x = SpherePoint::from_slice(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        let e1 = DVector::from_column_slice(&[1.0, 0.0, 0.0, 0.0]);
        let e2 = DVector::from_column_slice(&[0.0, 1.0, 0.0, 0.0]);
        let z = tangential_extension(&e1);
        let r = curvature_vec(&x, &e1, &e2, &z).unwrap();
        assert!((r - &e2).norm() < 1e-13);
        let v = curvature_operator_2form(&x, &e1, &e2, &e1, &e2).unwrap();
        assert!((v + 1.0).abs() < 1e-13);
    }

    #[test]
    fn geodesic_difference_matches_exact() {
        let f = SkewMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])).unwrap();
        let xi = killing_field_from_skew(&f);
        let x = unit(&[0.6, 0.8]);
        let dir = DVector::from_column_slice(&[-0.8, 0.6]);
        let fd = geodesic_difference(|p| xi.eval_vector(p), &x, &dir, 1e-5);
        let exact = ambient_derivative(&xi, x.as_slice(), &dir);
        assert!((fd - exact).norm() < 1e-8);
    }
}
