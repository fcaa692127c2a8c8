//! Symmetric 2-tensors on `Sⁿ`: `d∇`, `δ∇`, the rough Laplacian, the
//! Weitzenböck identity for trace-free tensors, and the pointwise estimates
//! that feed the rigidity argument.
//!
//! A field is stored as a polynomial matrix `h(y)` on `ℝ^{n+1}` that is
//! tangential on the sphere. Covariant derivatives are `∇_X h = P (D_X h) P`;
//! second derivatives come from exact second partials.

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::CliffordRep;
use crate::error::{GksError, Result};
use crate::field::{PolyField, ValueKind};
use crate::poly::{Monomial, Poly};
use crate::report::{tol, Check};
use crate::sampling;
use crate::sphere::{curvature_vec, geodesic_difference, sphere_curvature, tangential_extension, SpherePoint};

#[derive(Clone, Debug)]
pub struct SymTensorField {
    n: usize,
    value: PolyField,
    partials: Vec<PolyField>,
    trace_free: bool,
}

/// Ambient data of `h` at one point: value, `∂_c h`, `∂_c∂_d h`.
pub struct TensorJet {
    pub value: DMatrix<f64>,
    pub d1: Vec<DMatrix<f64>>,
    pub d2: Vec<Vec<DMatrix<f64>>>,
}

fn unpack(jac: &DMatrix<f64>, col: usize, m: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(m, m, jac.column(col).as_slice())
}

fn probe_points(ambient: usize) -> Vec<DVector<f64>> {
    sampling::sphere_points(ambient, 8, 0x5eed)
}

impl SymTensorField {
    /// Validates symmetry, tangentiality and (if claimed) tracelessness at
    /// deterministic probe points.
    pub fn new(value: PolyField, trace_free: bool) -> Result<Self> {
        let m = value.rows();
        if value.shape().len() != 2 || value.cols() != m {
            return Err(GksError::DimensionMismatch { expected: m, got: value.cols() });
        }
        if m < 3 {
            return Err(GksError::OutOfRange { what: "n", value: m as i64 - 1, range: ">= 2" });
        }
        if value.nvars() != m {
            return Err(GksError::DimensionMismatch { expected: m, got: value.nvars() });
        }
        let field = Self::unchecked(value, trace_free);
        for x in probe_points(m) {
            let h = field.value.eval_matrix(x.as_slice());
            let scale = 1.0 + h.amax();
            let asym = (&h - h.transpose()).amax();
            if asym > tol::TANGENCY * scale {
                return Err(GksError::Malformed(format!("tensor field is not symmetric (defect {asym:e})")));
            }
            let normal = (&h * &x).amax();
            if normal > tol::TANGENCY * scale {
                return Err(GksError::NotTangential(normal));
            }
            if trace_free && h.trace().abs() > tol::TANGENCY * scale {
                return Err(GksError::NotTraceFree(h.trace().abs()));
            }
        }
        Ok(field)
    }

    fn unchecked(value: PolyField, trace_free: bool) -> Self {
        let m = value.rows();
        let value = value.with_kind(ValueKind::SymmetricMatrix);
        let partials = (0..m).map(|c| value.partial(c)).collect();
        SymTensorField { n: m - 1, value, partials, trace_free }
    }

    /// `P S P` for a symmetric polynomial matrix `S`.
    pub fn from_ambient(s: &PolyField) -> Result<Self> {
        let m = s.rows();
        let p = PolyField::tangent_projector(m);
        let sym = s.add(&s.transpose()).scale(0.5);
        Ok(Self::unchecked(p.mat_mul(&sym).mat_mul(&p), false))
    }

    /// `c·g`.
    pub fn metric(n: usize, c: f64) -> Self {
        Self::unchecked(PolyField::tangent_projector(n + 1).scale(c), false)
    }

    /// `h - (tr h / n) g`.
    pub fn trace_free_part(&self) -> Self {
        let p = PolyField::tangent_projector(self.n + 1);
        let tr = self.value.trace().scale(1.0 / self.n as f64);
        Self::unchecked(self.value.sub(&p.scale_by(&tr)), true)
    }

    /// Trace-free part of `P S P` for a random symmetric `S` with Gaussian
    /// coefficients on all monomials of degree `≤ degree`.
    pub fn random(n: usize, degree: u32, rng: &mut ChaCha8Rng) -> Result<Self> {
        if n < 2 {
            return Err(GksError::OutOfRange { what: "n", value: n as i64, range: ">= 2" });
        }
        let m = n + 1;
        let monos = monomials(m, degree);
        let mut comps = vec![Poly::zero(m); m * m];
        for i in 0..m {
            for j in i..m {
                let p = Poly::from_terms(
                    m,
                    monos.iter().map(|&mono| {
                        let c: f64 = StandardNormal.sample(rng);
                        (mono, c)
                    }),
                );
                comps[i * m + j] = p.clone();
                comps[j * m + i] = p;
            }
        }
        Ok(Self::from_ambient(&PolyField::matrix(m, m, m, comps))?.trace_free_part())
    }

    /// Trace-free part of `P S P` for a constant symmetric `S`; for `S` the
    /// Hessian of a quadratic harmonic this is the trace-free Hessian of its
    /// restriction.
    pub fn hessian_type(n: usize, s: &DMatrix<f64>) -> Result<Self> {
        if s.nrows() != n + 1 || s.ncols() != n + 1 {
            return Err(GksError::DimensionMismatch { expected: n + 1, got: s.nrows() });
        }
        Ok(Self::from_ambient(&PolyField::constant_matrix(n + 1, s))?.trace_free_part())
    }

    /// `ξξᵀ - g/n` for `ξ = J x` with `J` an orthogonal complex structure:
    /// trace-free and divergence-free on odd spheres.
    pub fn hopf_tt(j: &DMatrix<f64>) -> Result<Self> {
        let m = j.nrows();
        let defect = (j * j + DMatrix::identity(m, m)).amax().max((j + j.transpose()).amax());
        if defect > 1e-12 {
            return Err(GksError::NotSkew(defect));
        }
        let xi = PolyField::linear_vector(j);
        let p = PolyField::tangent_projector(m);
        let h = xi.outer(&xi).axpy(-1.0 / (m - 1) as f64, &p);
        Self::new(h, true)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.n + 1
    }

    pub fn value(&self) -> &PolyField {
        &self.value
    }

    pub fn is_trace_free(&self) -> bool {
        self.trace_free
    }

    pub fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        self.value.eval_matrix(x)
    }

    fn jet1(&self, x: &[f64]) -> (DMatrix<f64>, Vec<DMatrix<f64>>) {
        let m = self.n + 1;
        let jet = self.value.jet(x);
        let value = DMatrix::from_row_slice(m, m, &jet.value);
        let d1 = (0..m).map(|c| unpack(&jet.jacobian, c, m)).collect();
        (value, d1)
    }

    pub fn jet(&self, x: &[f64]) -> TensorJet {
        let m = self.n + 1;
        let (value, _) = self.jet1(x);
        let mut d1 = Vec::with_capacity(m);
        let mut d2 = Vec::with_capacity(m);
        for p in &self.partials {
            let jet = p.jet(x);
            d1.push(DMatrix::from_row_slice(m, m, &jet.value));
            d2.push((0..m).map(|d| unpack(&jet.jacobian, d, m)).collect());
        }
        TensorJet { value, d1, d2 }
    }

    /// `∇_X h` as an ambient matrix.
    pub fn covariant(&self, x: &SpherePoint, xv: &DVector<f64>) -> DMatrix<f64> {
        let (_, d1) = self.jet1(x.as_slice());
        let p = x.projector();
        let mut dh = DMatrix::zeros(self.n + 1, self.n + 1);
        for (c, hc) in d1.iter().enumerate() {
            dh += hc * xv[c];
        }
        &p * dh * &p
    }

    /// `(∇_X h)Y - (∇_Y h)X`.
    pub fn dnabla(&self, x: &SpherePoint, xv: &DVector<f64>, yv: &DVector<f64>) -> DVector<f64> {
        self.covariant(x, xv) * yv - self.covariant(x, yv) * xv
    }

    /// `-Σ (∇_{E_i} h) E_i` in the given orthonormal tangent frame.
    pub fn deltanabla_in_frame(&self, x: &SpherePoint, frame: &DMatrix<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.n + 1);
        for e in frame.column_iter() {
            let e = e.into_owned();
            out -= self.covariant(x, &e) * &e;
        }
        out
    }

    pub fn deltanabla(&self, x: &SpherePoint) -> DVector<f64> {
        self.deltanabla_in_frame(x, &x.frame())
    }

    /// `T[d][c]` with `∇²_{X,Y} h = Σ X_d Y_c T[d][c]` for tangent `X, Y`.
    pub fn second_covariant(&self, x: &SpherePoint) -> SecondCovariant {
        let m = self.n + 1;
        let jet = self.jet(x.as_slice());
        let y = x.vector();
        let p = x.projector();
        let q: Vec<DMatrix<f64>> = (0..m)
            .map(|d| {
                let mut e = DVector::zeros(m);
                e[d] = 1.0;
                -(&e * y.transpose() + y * e.transpose())
            })
            .collect();
        let k: Vec<DMatrix<f64>> = jet.d1.iter().map(|hc| &p * hc * &p).collect();
        let mut t = vec![vec![DMatrix::zeros(m, m); m]; m];
        for d in 0..m {
            // ∂_d K_c = Q_d h_c P + P h_cd P + P h_c Q_d
            let dk: Vec<DMatrix<f64>> = (0..m)
                .map(|c| &q[d] * &jet.d1[c] * &p + &p * &jet.d2[c][d] * &p + &p * &jet.d1[c] * &q[d])
                .collect();
            for c in 0..m {
                // G_c = Σ P_{cc'} K_{c'}
                let mut dg = DMatrix::zeros(m, m);
                for cp in 0..m {
                    dg += &k[cp] * q[d][(c, cp)] + &dk[cp] * p[(c, cp)];
                }
                t[d][c] = &p * dg * &p;
            }
        }
        SecondCovariant { t }
    }

    /// `(d∇δ∇ + δ∇d∇) h`, `∇*∇ h`, `h∘Ric` and `R̊h` as ambient matrices,
    /// curvature taken from the closed form of the round metric.
    pub fn weitzenbock_terms(&self, x: &SpherePoint, frame: &DMatrix<f64>) -> WeitzenbockTerms {
        let m = self.n + 1;
        let s = self.second_covariant(x);
        let h = self.eval(x.as_slice());
        let e: Vec<DVector<f64>> = frame.column_iter().map(|c| c.into_owned()).collect();
        let mut rough = DMatrix::zeros(m, m);
        for ei in &e {
            rough -= s.apply(ei, ei);
        }
        let mut lhs = DMatrix::zeros(m, m);
        let mut ric = DMatrix::zeros(m, m);
        let mut ring = DMatrix::zeros(m, m);
        for xj in &e {
            let mut v = DVector::zeros(m);
            let mut r_x = DVector::zeros(m);
            let mut rr = DVector::zeros(m);
            for ei in &e {
                // d∇δ∇h: -(∇²_{X,E_i}h)E_i ; δ∇d∇h: -(∇²_{E_i,E_i}h)X + (∇²_{E_i,X}h)E_i
                v -= s.apply(xj, ei) * ei;
                v -= s.apply(ei, ei) * xj;
                v += s.apply(ei, xj) * ei;
                // R_{A,B}C = sphere_curvature(B, A, C)
                r_x += sphere_curvature(ei, xj, ei);
                rr += sphere_curvature(&(&h * ei), xj, ei);
            }
            lhs += &v * xj.transpose();
            ric += (&h * r_x) * xj.transpose();
            ring += rr * xj.transpose();
        }
        WeitzenbockTerms { lhs, rough_laplacian: rough, h_ric: ric, r_ring: ring }
    }

    /// Max entry of `(d∇δ∇ + δ∇d∇)h - ∇*∇h - h∘Ric + R̊h` at `x`.
    pub fn weitzenbock_residual(&self, x: &SpherePoint) -> f64 {
        let t = self.weitzenbock_terms(x, &x.frame());
        (t.lhs - t.rough_laplacian - t.h_ric + t.r_ring).amax()
    }

    /// Max of `|h∘Ric - (n-1)h|` and `|R̊h + h|`, with `R` from exact
    /// differentiation of vector fields.
    pub fn curvature_terms_defect(&self, x: &SpherePoint) -> Result<f64> {
        let m = self.n + 1;
        let frame = x.frame();
        let h = self.eval(x.as_slice());
        let mut ric = DMatrix::zeros(m, m);
        let mut ring = DMatrix::zeros(m, m);
        for xj in frame.column_iter() {
            let xj = xj.into_owned();
            let mut r_x = DVector::zeros(m);
            let mut rr = DVector::zeros(m);
            for ei in frame.column_iter() {
                let ei = ei.into_owned();
                let ext = tangential_extension(&ei);
                // curvature_vec(x, a, b, z) = R_{b,a} z
                r_x += curvature_vec(x, &ei, &xj, &ext)?;
                rr += curvature_vec(x, &(&h * &ei), &xj, &ext)?;
            }
            ric += (&h * r_x) * xj.transpose();
            ring += rr * xj.transpose();
        }
        let target_ric = &h * (self.n - 1) as f64;
        Ok((ric - target_ric).amax().max((ring + &h).amax()))
    }

    /// Frame-free pointwise norms: `(|∇h|², |d∇h|², |δ∇h|², |h|²)`.
    pub fn pointwise_norms(&self, x: &[f64]) -> PointwiseNorms {
        let m = self.n + 1;
        let (h, d1) = self.jet1(x);
        let xv = DVector::from_column_slice(x);
        let p = DMatrix::identity(m, m) - &xv * xv.transpose();
        let k: Vec<DMatrix<f64>> = d1.iter().map(|hc| &p * hc * &p).collect();
        // N_a = ∇_{P e_a} h
        let nmat: Vec<DMatrix<f64>> = (0..m)
            .map(|a| {
                let mut s = DMatrix::zeros(m, m);
                for (c, kc) in k.iter().enumerate() {
                    s += kc * p[(a, c)];
                }
                s
            })
            .collect();
        let grad = nmat.iter().map(|n| n.norm_squared()).sum();
        let mut d = 0.0;
        for a in 0..m {
            for b in (a + 1)..m {
                let w = nmat[a].column(b) - nmat[b].column(a);
                d += w.norm_squared();
            }
        }
        let mut div = DVector::zeros(m);
        for (a, na) in nmat.iter().enumerate() {
            div -= na.column(a);
        }
        PointwiseNorms { grad, dnabla: d, div: div.norm_squared(), h: h.norm_squared() }
    }
}

pub struct SecondCovariant {
    pub t: Vec<Vec<DMatrix<f64>>>,
}

impl SecondCovariant {
    /// `∇²_{X,Y} h`.
    pub fn apply(&self, xv: &DVector<f64>, yv: &DVector<f64>) -> DMatrix<f64> {
        let m = xv.len();
        let mut out = DMatrix::zeros(m, m);
        for d in 0..m {
            if xv[d] == 0.0 {
                continue;
            }
            for c in 0..m {
                let w = xv[d] * yv[c];
                if w != 0.0 {
                    out += &self.t[d][c] * w;
                }
            }
        }
        out
    }
}

pub struct WeitzenbockTerms {
    pub lhs: DMatrix<f64>,
    pub rough_laplacian: DMatrix<f64>,
    pub h_ric: DMatrix<f64>,
    pub r_ring: DMatrix<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PointwiseNorms {
    pub grad: f64,
    pub dnabla: f64,
    pub div: f64,
    pub h: f64,
}

fn monomials(nvars: usize, degree: u32) -> Vec<Monomial> {
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == cur.len() {
            out.push(Monomial::from_exponents(cur));
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, degree, &mut vec![0; nvars], &mut out);
    out
}

/// `(∇_X h)Y - (∇_Y h)X` from geodesic central differences of `h(P Y)` and `P Y`.
pub fn dnabla_finite_difference(h: &SymTensorField, x: &SpherePoint, xv: &DVector<f64>, yv: &DVector<f64>, step: f64) -> DVector<f64> {
    let cov = |u: &DVector<f64>, v: &DVector<f64>| {
        let hv = |y: &[f64]| {
            let yy = DVector::from_column_slice(y);
            let pv = v - &yy * yy.dot(v);
            h.eval(y) * pv
        };
        let ext = |y: &[f64]| {
            let yy = DVector::from_column_slice(y);
            v - &yy * yy.dot(v)
        };
        let d_hv = x.tangent_project(&geodesic_difference(hv, x.vector(), u, step));
        let d_v = x.tangent_project(&geodesic_difference(ext, x.vector(), u, step));
        d_hv - h.eval(x.as_slice()) * d_v
    };
    cov(xv, yv) - cov(yv, xv)
}

#[derive(Clone, Debug, Serialize)]
pub struct WeitzenbockReport {
    pub residual: f64,
    pub curvature_terms: f64,
    pub samples: usize,
    pub seed: u64,
}

impl WeitzenbockReport {
    pub fn checks(&self, prefix: &str) -> Vec<Check> {
        vec![
            Check::at_most(format!("{prefix}weitzenbock_residual"), self.residual, tol::WEITZENBOCK),
            Check::at_most(format!("{prefix}curvature_terms"), self.curvature_terms, tol::EXACT),
        ]
    }
}

/// Rejects fields not flagged trace-free.
pub fn check_weitzenbock(h: &SymTensorField, samples: usize, seed: u64) -> Result<WeitzenbockReport> {
    if !h.is_trace_free() {
        return Err(GksError::NotTraceFree(f64::NAN));
    }
    let points: Vec<SpherePoint> =
        sampling::sphere_points(h.ambient_dim(), samples, seed).into_iter().map(SpherePoint::normalized).collect();
    let residual = points.par_iter().map(|x| h.weitzenbock_residual(x)).reduce(|| 0.0, f64::max);
    let curvature_terms = points
        .iter()
        .take(3)
        .map(|x| h.curvature_terms_defect(x))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(WeitzenbockReport { residual, curvature_terms, samples, seed })
}

/// `(½ Σ |h(e_i)∧e_j + e_i∧h(e_j)|², (n-2)|h|²)` for a symmetric matrix.
pub fn algebraic_identity(h: &DMatrix<f64>, n: usize) -> Result<(f64, f64)> {
    if h.nrows() != n || h.ncols() != n {
        return Err(GksError::DimensionMismatch { expected: n, got: h.nrows() });
    }
    let mut lhs = 0.0f64;
    for i in 0..n {
        let hi = h.column(i);
        for j in 0..n {
            let hj = h.column(j);
            // 2-form as a skew matrix; |ω|² = ½ ‖ω‖_F²
            let mut w = DMatrix::<f64>::zeros(n, n);
            for a in 0..n {
                w[(a, j)] += hi[a];
                w[(j, a)] -= hi[a];
                w[(i, a)] += hj[a];
                w[(a, i)] -= hj[a];
            }
            lhs += 0.5 * w.norm_squared() * 0.5;
        }
    }
    Ok((lhs, (n as f64 - 2.0) * h.norm_squared()))
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoFormReport {
    /// `max(|ω·Φ|² - |ω|²)`.
    pub max_excess: f64,
    pub violations: usize,
    /// `max | |X·Φ| - |X| |`.
    pub vector_isometry: f64,
    /// `max(|ω·Φ| - Σ|λ_k|)` over the normal form of `ω`.
    pub sharp_bound_excess: f64,
    pub samples: usize,
    pub seed: u64,
}

impl TwoFormReport {
    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::at_most("two_form_norm_inequality", self.max_excess.max(0.0), tol::TWO_FORM),
            Check::at_most("clifford_vector_isometry", self.vector_isometry, tol::TWO_FORM),
            Check::at_most("two_form_normal_form_bound", self.sharp_bound_excess.max(0.0), tol::TWO_FORM),
        ]
    }
}

/// `|ω|² = Σ_{i<j} ω_ij²`.
pub fn two_form_norm_squared(omega: &DMatrix<f64>) -> f64 {
    0.5 * omega.norm_squared()
}

/// `Σ |λ_k|` for the normal form `ω = Σ λ_k f_{2k-1}∧f_{2k}`.
pub fn normal_form_l1(omega: &DMatrix<f64>) -> f64 {
    0.5 * crate::linalg::singular_values(omega).iter().sum::<f64>()
}

/// Random Gaussian 2-forms against random unit spinors of `rep`.
pub fn two_form_norm_inequality(rep: &CliffordRep, samples: usize, seed: u64) -> Result<TwoFormReport> {
    let m = rep.generators();
    let dim = rep.module_dim();
    let mut rng = sampling::rng(seed);
    let mut max_excess = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut iso = 0.0f64;
    let mut sharp = f64::NEG_INFINITY;
    for _ in 0..samples {
        let g = sampling::gaussian_vector(&mut rng, m * m);
        let g = DMatrix::from_column_slice(m, m, g.as_slice());
        let omega = (&g - g.transpose()) * 0.5;
        let phi = sampling::sphere_point(&mut rng, dim);
        let w_phi = rep.bivector_action(&omega)? * &phi;
        let excess = w_phi.norm_squared() - two_form_norm_squared(&omega);
        if excess > tol::TWO_FORM {
            violations += 1;
        }
        max_excess = max_excess.max(excess);
        sharp = sharp.max(w_phi.norm() - normal_form_l1(&omega));
        let xv = sampling::gaussian_vector(&mut rng, m);
        iso = iso.max((rep.apply_vector(xv.as_slice(), phi.as_slice()).norm() - xv.norm()).abs());
    }
    Ok(TwoFormReport { max_excess, violations, vector_isometry: iso, sharp_bound_excess: sharp, samples, seed })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralReport {
    pub n: usize,
    /// `∫|d∇h|²`, plus `∫|δ∇h|²` when `divergence_term` is set.
    pub lhs: f64,
    /// `∫|∇h|² + n|h|²`.
    pub rhs: f64,
    pub relative_error: f64,
    pub divergence_term: bool,
    pub max_divergence: f64,
    pub samples: usize,
    pub seed: u64,
}

impl IntegralReport {
    pub fn checks(&self, prefix: &str) -> Vec<Check> {
        vec![Check::at_most(format!("{prefix}integral_identity"), self.relative_error, tol::QUADRATURE)]
    }
}

pub fn sphere_volume(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / (n - 1) as f64 * sphere_volume(n - 2),
    }
}

const SHARDS: u64 = 64;

fn monte_carlo(h: &SymTensorField, samples: usize, seed: u64) -> (PointwiseNorms, f64) {
    let m = h.ambient_dim();
    let per = samples as u64 / SHARDS;
    let extra = samples as u64 % SHARDS;
    let partial: Vec<(PointwiseNorms, f64)> = (0..SHARDS)
        .into_par_iter()
        .map(|s| {
            let mut rng = sampling::substream(seed, 1000 + s);
            let count = per + u64::from(s < extra);
            let mut acc = PointwiseNorms::default();
            let mut max_div = 0.0f64;
            for _ in 0..count {
                let x = sampling::sphere_point(&mut rng, m);
                let p = h.pointwise_norms(x.as_slice());
                acc.grad += p.grad;
                acc.dnabla += p.dnabla;
                acc.div += p.div;
                acc.h += p.h;
                max_div = max_div.max(p.div.sqrt());
            }
            (acc, max_div)
        })
        .collect();
    let mut total = PointwiseNorms::default();
    let mut max_div = 0.0f64;
    for (p, d) in partial {
        total.grad += p.grad;
        total.dnabla += p.dnabla;
        total.div += p.div;
        total.h += p.h;
        max_div = max_div.max(d);
    }
    let scale = sphere_volume(h.n()) / samples as f64;
    total.grad *= scale;
    total.dnabla *= scale;
    total.div *= scale;
    total.h *= scale;
    (total, max_div)
}

fn integral(h: &SymTensorField, samples: usize, seed: u64, divergence_term: bool) -> Result<IntegralReport> {
    if samples == 0 {
        return Err(GksError::OutOfRange { what: "samples", value: 0, range: ">= 1" });
    }
    if !h.is_trace_free() {
        return Err(GksError::NotTraceFree(f64::NAN));
    }
    let (t, max_divergence) = monte_carlo(h, samples, seed);
    let lhs = t.dnabla + if divergence_term { t.div } else { 0.0 };
    let rhs = t.grad + h.n() as f64 * t.h;
    let relative_error = if rhs.abs() > 0.0 { (lhs - rhs).abs() / rhs.abs() } else { lhs.abs() };
    Ok(IntegralReport { n: h.n(), lhs, rhs, relative_error, divergence_term, max_divergence, samples, seed })
}

/// `∫|d∇h|² = ∫|∇h|² + n|h|²` for trace-free, divergence-free `h`; the
/// divergence is checked at probe points first.
pub fn integral_identity(h: &SymTensorField, samples: usize, seed: u64) -> Result<IntegralReport> {
    let worst = probe_points(h.ambient_dim())
        .into_iter()
        .map(|x| h.deltanabla(&SpherePoint::normalized(x)).norm())
        .fold(0.0, f64::max);
    if worst > tol::EXACT {
        return Err(GksError::NotDivergenceFree(worst));
    }
    integral(h, samples, seed, false)
}

/// `∫|d∇h|² + |δ∇h|² = ∫|∇h|² + n|h|²` for any trace-free `h`.
pub fn integral_identity_general(h: &SymTensorField, samples: usize, seed: u64) -> Result<IntegralReport> {
    integral(h, samples, seed, true)
}

/// `f = x₀x₁` on `Sⁿ`: the trace-free Hessian of a degree-2 harmonic.
pub fn harmonic_hessian_field(n: usize) -> Result<SymTensorField> {
    let mut s = DMatrix::zeros(n + 1, n + 1);
    s[(0, 1)] = 1.0;
    s[(1, 0)] = 1.0;
    SymTensorField::hessian_type(n, &s)
}
