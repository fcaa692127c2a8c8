//! Why `S¹⁵` carries no two-eigenvalue generalized Killing spinor: a `Cl₇`
//! structure on `ℝ¹⁶` gives cross products `P_x` that genuinely depend on `x`,
//! and the span of the `ξ_i = e_i·x` is not totally geodesic.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::clifford::{build_rep, CliffordRep};
use crate::error::{GksError, Result};
use crate::report::{tol, Check};
use crate::sampling;

/// `P[i][j][k]`, row-major in `7×7×7`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossProduct {
    pub p: Vec<f64>,
}

impl CrossProduct {
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.p[(i * 7 + j) * 7 + k]
    }

    /// `P(u, v)` for vectors of `ℝ⁷`.
    pub fn apply(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(7);
        for i in 0..7 {
            for j in 0..7 {
                let c = u[i] * v[j];
                if c != 0.0 {
                    for k in 0..7 {
                        out[k] += c * self.at(i, j, k);
                    }
                }
            }
        }
        out
    }

    pub fn distance(&self, other: &CrossProduct) -> f64 {
        self.p.iter().zip(&other.p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

/// The first seven generators of `Cl₈` on `ℝ¹⁶`.
pub fn cl7_on_r16() -> CliffordRep {
    build_rep(8).expect("m = 8").truncate(7)
}

/// Solves `(e_i∧e_j)·x = P_x(e_i, e_j)·x` using the orthonormal basis `{x, e_k·x}`
/// of the 8-dimensional module containing `x`.
pub fn cross_product_from_spinor(rep: &CliffordRep, x: &DVector<f64>) -> Result<CrossProduct> {
    if rep.generators() != 7 {
        return Err(GksError::DimensionMismatch { expected: 7, got: rep.generators() });
    }
    let norm = x.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(GksError::NotUnit(norm));
    }
    let ex: Vec<DVector<f64>> = (0..7).map(|k| rep.gamma(k).apply(x.as_slice())).collect();
    let mut p = vec![0.0; 343];
    for i in 0..7 {
        for j in 0..7 {
            let mut u = vec![0.0; 7];
            let mut v = vec![0.0; 7];
            u[i] = 1.0;
            v[j] = 1.0;
            let w = rep.two_form_action(&u, &v)? * x;
            let mut resid = w.clone();
            for k in 0..7 {
                let c = w.dot(&ex[k]);
                p[(i * 7 + j) * 7 + k] = c;
                resid.axpy(-c, &ex[k], 1.0);
            }
            if resid.norm() > 1e-9 {
                return Err(GksError::Singular(format!(
                    "(e_{i}∧e_{j})·x leaves span{{e_k·x}} (residual {:e}); x is not in an irreducible summand",
                    resid.norm()
                )));
            }
        }
    }
    Ok(CrossProduct { p })
}

#[derive(Clone, Debug, Serialize)]
pub struct Dim15Report {
    pub trials: usize,
    pub seed: u64,
    pub min_pair_distance: f64,
    pub max_pair_distance: f64,
    pub fraction_above: f64,
    pub threshold: f64,
    /// Max over sampled `x ∈ S¹⁵` of the distance of `∇_{ξ_i}ξ_j` from `span{ξ_k}`.
    pub totally_geodesic_failure: f64,
    pub volume_defect: f64,
    pub cross_product_defect: f64,
}

impl Dim15Report {
    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::at_most("cl7_volume_split", self.volume_defect, tol::CLIFFORD),
            Check::at_most("cross_product_properties", self.cross_product_defect, 1e-10),
            Check::at_least("pair_fraction_above_threshold", self.fraction_above, 0.95),
            Check::at_least("totally_geodesic_failure", self.totally_geodesic_failure, 1e-3),
        ]
    }
}

/// Antisymmetry, `|P(u,v)| = 1` and `P(u,v) ⊥ u, v` on basis pairs.
pub fn cross_product_defect(p: &CrossProduct) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..7 {
        for j in 0..7 {
            for k in 0..7 {
                worst = worst.max((p.at(i, j, k) + p.at(j, i, k)).abs());
            }
            if i != j {
                let norm: f64 = (0..7).map(|k| p.at(i, j, k).powi(2)).sum::<f64>().sqrt();
                worst = worst.max((norm - 1.0).abs());
                worst = worst.max(p.at(i, j, i).abs()).max(p.at(i, j, j).abs());
            }
        }
    }
    worst
}

/// `max_{i≠j} dist(P_T(e_j e_i x), span{e_k x})` at `x ∈ S¹⁵`.
pub fn totally_geodesic_failure(rep: &CliffordRep, x: &DVector<f64>) -> f64 {
    let xi: Vec<DVector<f64>> = (0..7).map(|k| rep.gamma(k).apply(x.as_slice())).collect();
    let basis = crate::linalg::orthonormal_column_basis(&DMatrix::from_columns(&xi), 1e-12);
    let mut worst = 0.0f64;
    for i in 0..7 {
        for j in 0..7 {
            if i == j {
                continue;
            }
            // ∇_{ξ_i} ξ_j = P_T(D_{ξ_i}(e_j x)) = P_T(e_j e_i x)
            let mut v = rep.gamma(j).apply(xi[i].as_slice());
            let d = v.dot(x);
            v.axpy(-d, x, 1.0);
            let proj = &basis * (basis.transpose() * &v);
            worst = worst.max((v - proj).norm());
        }
    }
    worst
}

pub fn dim15_obstruction(trials: usize, seed: u64) -> Result<Dim15Report> {
    if trials == 0 {
        return Err(GksError::OutOfRange { what: "trials", value: 0, range: ">= 1" });
    }
    let threshold = 0.1;
    let rep = cl7_on_r16();
    let split = rep.half_spinor_split()?;
    let vol = rep.volume_dense();
    let volume_defect = (&vol * &split.proj_plus - &split.proj_plus)
        .amax()
        .max((&vol * &split.proj_minus + &split.proj_minus).amax())
        .max((split.rank_plus() as f64 - 8.0).abs())
        .max((split.rank_minus() as f64 - 8.0).abs());
    let sigma1 = split.basis_plus();
    let mut rng = sampling::rng(seed);
    let mut dists = Vec::with_capacity(trials);
    let mut cp_defect = 0.0f64;
    for _ in 0..trials {
        let x = sampling::unit_in_span(&mut rng, &sigma1);
        let y = sampling::unit_in_span(&mut rng, &sigma1);
        let px = cross_product_from_spinor(&rep, &x)?;
        let py = cross_product_from_spinor(&rep, &y)?;
        cp_defect = cp_defect.max(cross_product_defect(&px)).max(cross_product_defect(&py));
        dists.push(px.distance(&py));
    }
    let tg_points = trials.min(10);
    let tg = (0..tg_points)
        .map(|_| totally_geodesic_failure(&rep, &sampling::sphere_point(&mut rng, 16)))
        .fold(0.0, f64::max);
    let above = dists.iter().filter(|&&d| d > threshold).count();
    Ok(Dim15Report {
        trials,
        seed,
        min_pair_distance: dists.iter().copied().fold(f64::INFINITY, f64::min),
        max_pair_distance: dists.iter().copied().fold(0.0, f64::max),
        fraction_above: above as f64 / trials as f64,
        threshold,
        totally_geodesic_failure: tg,
        volume_defect,
        cross_product_defect: cp_defect,
    })
}
