//! Which two-eigenvalue data `(n; λ, μ; p, q)` can carry a generalized Killing
//! spinor on `Sⁿ`.

use serde::Serialize;

use crate::clifford::radon_hurwitz_admissible;
use crate::error::{GksError, Result};

const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoEigData {
    pub n: usize,
    pub lambda: f64,
    pub mu: f64,
    pub p: usize,
    pub q: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reason {
    ConstraintElmFailed,
    EigenvalueNotHalf,
    MuNotMinus3Over2,
    MultiplicityQNeP1,
    RadonHurwitzFail,
    Dim15CrossProductObstruction,
    /// `λ = μ`: a Killing spinor exactly when `λ = ±½`.
    EqualEigenvalues,
    Ok,
}

impl Reason {
    pub fn label(self) -> &'static str {
        match self {
            Reason::ConstraintElmFailed => "constraint-elm-failed",
            Reason::EigenvalueNotHalf => "eigenvalue-not-half",
            Reason::MuNotMinus3Over2 => "mu-not-minus-3/2",
            Reason::MultiplicityQNeP1 => "multiplicity-q-ne-p+1",
            Reason::RadonHurwitzFail => "radon-hurwitz-fail",
            Reason::Dim15CrossProductObstruction => "dim15-cross-product-obstruction",
            Reason::EqualEigenvalues => "equal-eigenvalues",
            Reason::Ok => "ok",
        }
    }

    /// The lemma each rejection rests on.
    pub fn explanation(self) -> &'static str {
        match self {
            Reason::ConstraintElmFailed => {
                "the scalar constraint (pλ+qμ)² - (pλ²+qμ²) = n(n-1)/4 fails for constant eigenvalues"
            }
            Reason::EigenvalueNotHalf => "one of the two eigenvalues must be ±1/2",
            Reason::MuNotMinus3Over2 => "once λ = 1/2, the second eigenvalue must be -3/2",
            Reason::MultiplicityQNeP1 => "the multiplicities are related by q = p + 1",
            Reason::RadonHurwitzFail => "T^μ carries a Cl_p module of dimension q = p + 1, which needs p ∈ {1, 3, 7}",
            Reason::Dim15CrossProductObstruction => {
                "on S^15 the vector cross product P_x would be independent of x, which is impossible"
            }
            Reason::EqualEigenvalues => "λ = μ: Killing spinor iff λ = ±1/2",
            Reason::Ok => "admissible",
        }
    }
}

impl Serialize for Reason {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoEigVerdict {
    pub admissible: bool,
    pub reason: Reason,
    /// Data after swapping and orientation change, so that `λ = ½`.
    pub normalized: Option<TwoEigData>,
    /// Only for `λ = μ`.
    pub killing: Option<bool>,
}

impl TwoEigVerdict {
    fn reject(reason: Reason, normalized: Option<TwoEigData>) -> Self {
        TwoEigVerdict { admissible: false, reason, normalized, killing: None }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < EPS
}

pub fn elm_residual(d: &TwoEigData) -> f64 {
    let (p, q) = (d.p as f64, d.q as f64);
    let a = p * d.lambda + q * d.mu;
    let t2 = p * d.lambda * d.lambda + q * d.mu * d.mu;
    a * a - t2 - (d.n * (d.n - 1)) as f64 / 4.0
}

fn normalize(d: &TwoEigData) -> Option<TwoEigData> {
    let swapped = TwoEigData { lambda: d.mu, mu: d.lambda, p: d.q, q: d.p, ..*d };
    let candidates: Vec<TwoEigData> = [*d, swapped]
        .into_iter()
        .filter(|c| close(c.lambda.abs(), 0.5))
        .map(|c| if c.lambda < 0.0 { TwoEigData { lambda: -c.lambda, mu: -c.mu, ..c } } else { c })
        .collect();
    candidates
        .iter()
        .find(|c| close(c.mu, -1.5))
        .or(candidates.first())
        .copied()
}

/// The Killing verdict for `λ = μ`.
pub fn killing_verdict(lambda: f64) -> bool {
    close(lambda.abs(), 0.5)
}

/// First failing condition, in the order: scalar constraint, a `±½`
/// eigenvalue, `μ = -3/2`, `q = p + 1`, Radon–Hurwitz, the `n = 15` exclusion.
pub fn two_eig_classify(data: &TwoEigData) -> Result<TwoEigVerdict> {
    if data.p == 0 || data.q == 0 || data.p + data.q != data.n {
        return Err(GksError::Malformed(format!(
            "multiplicities p = {}, q = {} must be positive with p + q = n = {}",
            data.p, data.q, data.n
        )));
    }
    if !data.lambda.is_finite() || !data.mu.is_finite() {
        return Err(GksError::Malformed("eigenvalues must be finite".into()));
    }
    if close(data.lambda, data.mu) {
        let k = killing_verdict(data.lambda);
        return Ok(TwoEigVerdict { admissible: false, reason: Reason::EqualEigenvalues, normalized: None, killing: Some(k) });
    }
    if elm_residual(data).abs() > EPS {
        return Ok(TwoEigVerdict::reject(Reason::ConstraintElmFailed, None));
    }
    let Some(norm) = normalize(data) else {
        return Ok(TwoEigVerdict::reject(Reason::EigenvalueNotHalf, None));
    };
    let some = Some(norm);
    if !close(norm.mu, -1.5) {
        return Ok(TwoEigVerdict::reject(Reason::MuNotMinus3Over2, some));
    }
    if norm.q != norm.p + 1 {
        return Ok(TwoEigVerdict::reject(Reason::MultiplicityQNeP1, some));
    }
    if !radon_hurwitz_admissible(norm.p, norm.q) {
        return Ok(TwoEigVerdict::reject(Reason::RadonHurwitzFail, some));
    }
    if norm.n == 15 {
        return Ok(TwoEigVerdict::reject(Reason::Dim15CrossProductObstruction, some));
    }
    Ok(TwoEigVerdict { admissible: true, reason: Reason::Ok, normalized: some, killing: None })
}

/// All data with `n ∈ 3..=max_n`, `λ ≠ μ ∈ {k/2 : |k| ≤ max_k}`, `p + q = n`.
pub fn grid(max_n: usize, max_k: i32) -> Vec<TwoEigData> {
    let vals: Vec<f64> = (-max_k..=max_k).map(|k| k as f64 / 2.0).collect();
    let mut out = Vec::new();
    for n in 3..=max_n {
        for &lambda in &vals {
            for &mu in &vals {
                if lambda == mu {
                    continue;
                }
                for p in 1..n {
                    out.push(TwoEigData { n, lambda, mu, p, q: n - p });
                }
            }
        }
    }
    out
}
