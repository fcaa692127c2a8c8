//! Real Clifford algebras `Cl_m` (negative definite, `e_i² = -1`) realized by
//! integer signed-permutation matrices on their minimal modules.
//!
//! Construction: Cayley–Dickson doubling ℝ → ℂ → ℍ → 𝕆 gives left
//! multiplications by imaginary units, i.e. up to 7 anticommuting complex
//! structures on ℝ⁸. Doubling once more gives `Cl_8` on ℝ¹⁶, and the
//! 8-periodicity step `Γ_i ⊗ I`, `ω_8 ⊗ e_j` reaches `m ≤ 16`.

use nalgebra::{DMatrix, DVector};

use crate::error::{GksError, Result};
use crate::linalg::orthonormal_column_basis;

/// Minimal faithful module dimension of `Cl_m` for `m = 1..=16`.
pub const MODULE_DIMS: [usize; 16] = [2, 4, 4, 8, 8, 8, 8, 16, 32, 64, 64, 128, 128, 128, 128, 256];

pub const MAX_GENERATORS: usize = 16;

/// A matrix with exactly one entry `±1` in every row: `M[i][perm[i]] = sign[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPerm {
    perm: Vec<usize>,
    sign: Vec<i8>,
}

impl SignedPerm {
    pub fn identity(n: usize) -> Self {
        SignedPerm { perm: (0..n).collect(), sign: vec![1; n] }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// From column images: column `c` equals `sign[c] · e_{row[c]}`.
    fn from_columns(rows: &[usize], signs: &[i8]) -> Self {
        let n = rows.len();
        let mut perm = vec![usize::MAX; n];
        let mut sign = vec![0; n];
        for c in 0..n {
            perm[rows[c]] = c;
            sign[rows[c]] = signs[c];
        }
        debug_assert!(perm.iter().all(|&p| p != usize::MAX));
        SignedPerm { perm, sign }
    }

    pub fn neg(&self) -> Self {
        SignedPerm { perm: self.perm.clone(), sign: self.sign.iter().map(|s| -s).collect() }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        let n = self.dim();
        assert_eq!(n, other.dim());
        let perm = (0..n).map(|i| other.perm[self.perm[i]]).collect();
        let sign = (0..n).map(|i| self.sign[i] * other.sign[self.perm[i]]).collect();
        SignedPerm { perm, sign }
    }

    pub fn transpose(&self) -> SignedPerm {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut sign = vec![0; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            sign[self.perm[i]] = self.sign[i];
        }
        SignedPerm { perm, sign }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &SignedPerm) -> SignedPerm {
        let (a, b) = (self.dim(), other.dim());
        let mut perm = Vec::with_capacity(a * b);
        let mut sign = Vec::with_capacity(a * b);
        for i in 0..a {
            for k in 0..b {
                perm.push(self.perm[i] * b + other.perm[k]);
                sign.push(self.sign[i] * other.sign[k]);
            }
        }
        SignedPerm { perm, sign }
    }

    pub fn apply(&self, v: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.dim(), (0..self.dim()).map(|i| self.sign[i] as f64 * v[self.perm[i]]))
    }

    /// `out += s · M v`.
    pub fn apply_add(&self, s: f64, v: &[f64], out: &mut [f64]) {
        for i in 0..self.dim() {
            out[i] += s * self.sign[i] as f64 * v[self.perm[i]];
        }
    }

    pub fn row(&self, i: usize) -> (usize, i8) {
        (self.perm[i], self.sign[i])
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, self.perm[i])] = self.sign[i] as f64;
        }
        m
    }

    /// Dense integer rows, for JSON dumps.
    pub fn to_integer_rows(&self) -> Vec<Vec<i8>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut row = vec![0; n];
                row[self.perm[i]] = self.sign[i];
                row
            })
            .collect()
    }

    pub fn is_identity_scaled(&self, s: i8) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| p == i) && self.sign.iter().all(|&x| x == s)
    }
}

/// Basis product in the Cayley–Dickson algebra of dimension `dim`:
/// `e_i e_j = sign · e_k`.
fn cayley_dickson(dim: usize, i: usize, j: usize) -> (i8, usize) {
    if dim == 1 {
        return (1, 0);
    }
    let h = dim / 2;
    let conj = |k: usize| if k == 0 { 1 } else { -1 };
    match (i < h, j < h) {
        (true, true) => cayley_dickson(h, i, j),
        // (a,0)(0,d) = (0, d a)
        (true, false) => {
            let (s, k) = cayley_dickson(h, j - h, i);
            (s, k + h)
        }
        // (0,b)(c,0) = (0, b c̄)
        (false, true) => {
            let (s, k) = cayley_dickson(h, i - h, j);
            (s * conj(j), k + h)
        }
        // (0,b)(0,d) = (-d̄ b, 0)
        (false, false) => {
            let (s, k) = cayley_dickson(h, j - h, i - h);
            (-s * conj(j - h), k)
        }
    }
}

/// Left multiplication by the basis unit `e_unit` of the Cayley–Dickson algebra of dimension `dim`.
pub fn cayley_dickson_left(dim: usize, unit: usize) -> SignedPerm {
    let (rows, signs): (Vec<usize>, Vec<i8>) = (0..dim)
        .map(|c| {
            let (s, k) = cayley_dickson(dim, unit, c);
            (k, s)
        })
        .unzip();
    SignedPerm::from_columns(&rows, &signs)
}

/// Right multiplication by `e_unit`: `v ↦ v e_unit`.
pub fn cayley_dickson_right(dim: usize, unit: usize) -> SignedPerm {
    let (rows, signs): (Vec<usize>, Vec<i8>) = (0..dim)
        .map(|c| {
            let (s, k) = cayley_dickson(dim, c, unit);
            (k, s)
        })
        .unzip();
    SignedPerm::from_columns(&rows, &signs)
}

fn base_generators(m: usize) -> Vec<SignedPerm> {
    match m {
        1 => vec![cayley_dickson_left(2, 1)],
        2..=3 => (1..=m).map(|i| cayley_dickson_left(4, i)).collect(),
        4..=7 => (1..=m).map(|i| cayley_dickson_left(8, i)).collect(),
        8 => {
            // Γ_i = [[0, J_i], [J_i, 0]], Γ_8 = [[0, -I], [I, 0]]
            let swap = SignedPerm::from_columns(&[1, 0], &[1, 1]);
            let j2 = cayley_dickson_left(2, 1);
            let mut gens: Vec<_> = (1..=7).map(|i| swap.kron(&cayley_dickson_left(8, i))).collect();
            gens.push(j2.kron(&SignedPerm::identity(8)));
            gens
        }
        _ => unreachable!("base generators only for m <= 8"),
    }
}

fn ordered_product(gens: &[SignedPerm]) -> SignedPerm {
    gens.iter()
        .fold(SignedPerm::identity(gens[0].dim()), |acc, g| acc.compose(g))
}

/// A system of anticommuting skew-symmetric orthogonal generators of `Cl_m`.
#[derive(Clone, Debug)]
pub struct CliffordRep {
    gammas: Vec<SignedPerm>,
    volume: SignedPerm,
}

/// Projectors onto the `±1` eigenspaces of a volume-type involution.
#[derive(Clone, Debug)]
pub struct HalfSpinorSplit {
    pub proj_plus: DMatrix<f64>,
    pub proj_minus: DMatrix<f64>,
}

impl HalfSpinorSplit {
    pub fn from_involution(inv: &DMatrix<f64>) -> Self {
        let id = DMatrix::identity(inv.nrows(), inv.ncols());
        HalfSpinorSplit {
            proj_plus: (&id + inv) * 0.5,
            proj_minus: (&id - inv) * 0.5,
        }
    }

    pub fn basis_plus(&self) -> DMatrix<f64> {
        orthonormal_column_basis(&self.proj_plus, 1e-9)
    }

    pub fn basis_minus(&self) -> DMatrix<f64> {
        orthonormal_column_basis(&self.proj_minus, 1e-9)
    }

    pub fn rank_plus(&self) -> usize {
        self.proj_plus.trace().round() as usize
    }

    pub fn rank_minus(&self) -> usize {
        self.proj_minus.trace().round() as usize
    }
}

/// Build the deterministic generator system for `Cl_m`, `1 ≤ m ≤ 16`.
pub fn build_rep(m: usize) -> Result<CliffordRep> {
    if !(1..=MAX_GENERATORS).contains(&m) {
        return Err(GksError::OutOfRange { what: "m", value: m as i64, range: "1..=16" });
    }
    let gammas = if m <= 8 {
        base_generators(m)
    } else {
        let g8 = base_generators(8);
        let w8 = ordered_product(&g8);
        let base = base_generators(m - 8);
        let inner = base[0].dim();
        let id = SignedPerm::identity(inner);
        g8.iter()
            .map(|g| g.kron(&id))
            .chain(base.iter().map(|e| w8.kron(e)))
            .collect()
    };
    Ok(CliffordRep::from_generators(gammas))
}

impl CliffordRep {
    pub fn from_generators(gammas: Vec<SignedPerm>) -> Self {
        assert!(!gammas.is_empty());
        let volume = ordered_product(&gammas);
        CliffordRep { gammas, volume }
    }

    /// The subsystem generated by the first `k` generators.
    pub fn truncate(&self, k: usize) -> CliffordRep {
        CliffordRep::from_generators(self.gammas[..k].to_vec())
    }

    pub fn generators(&self) -> usize {
        self.gammas.len()
    }

    pub fn module_dim(&self) -> usize {
        self.gammas[0].dim()
    }

    pub fn gamma(&self, i: usize) -> &SignedPerm {
        &self.gammas[i]
    }

    pub fn gammas(&self) -> &[SignedPerm] {
        &self.gammas
    }

    pub fn volume(&self) -> &SignedPerm {
        &self.volume
    }

    pub fn gamma_dense(&self, i: usize) -> DMatrix<f64> {
        self.gammas[i].to_dense()
    }

    pub fn volume_dense(&self) -> DMatrix<f64> {
        self.volume.to_dense()
    }

    /// Ordered product `e_{i_1} ⋯ e_{i_k}`.
    pub fn product(&self, indices: &[usize]) -> SignedPerm {
        indices
            .iter()
            .fold(SignedPerm::identity(self.module_dim()), |acc, &i| acc.compose(&self.gammas[i]))
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.generators() {
            return Err(GksError::DimensionMismatch { expected: self.generators(), got: v.len() });
        }
        Ok(())
    }

    /// Clifford multiplication `X · φ` with `X = Σ X_i e_i`.
    pub fn apply_vector(&self, x: &[f64], phi: &[f64]) -> DVector<f64> {
        let mut out = vec![0.0; self.module_dim()];
        for (g, &xi) in self.gammas.iter().zip(x) {
            if xi != 0.0 {
                g.apply_add(xi, phi, &mut out);
            }
        }
        DVector::from_vec(out)
    }

    /// Dense matrix of `X ·`.
    pub fn vector_action(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_len(x)?;
        let n = self.module_dim();
        let mut m = DMatrix::zeros(n, n);
        for (g, &xi) in self.gammas.iter().zip(x) {
            for r in 0..n {
                let (c, s) = g.row(r);
                m[(r, c)] += xi * s as f64;
            }
        }
        Ok(m)
    }

    /// `(X ∧ Y)· = X·Y· + g(X, Y) Id`.
    pub fn two_form_action(&self, x: &[f64], y: &[f64]) -> Result<DMatrix<f64>> {
        self.check_len(y)?;
        let gx = self.vector_action(x)?;
        let gy = self.vector_action(y)?;
        let g: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        Ok(gx * gy + DMatrix::identity(self.module_dim(), self.module_dim()) * g)
    }

    /// Action of a 2-form given by a skew matrix `ω = Σ_{i<j} ω_ij e_i ∧ e_j`.
    pub fn bivector_action(&self, omega: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let m = self.generators();
        if omega.nrows() != m || omega.ncols() != m {
            return Err(GksError::DimensionMismatch { expected: m, got: omega.nrows() });
        }
        let n = self.module_dim();
        let mut out = DMatrix::zeros(n, n);
        for i in 0..m {
            for j in (i + 1)..m {
                let w = omega[(i, j)];
                if w != 0.0 {
                    let p = self.gammas[i].compose(&self.gammas[j]);
                    for r in 0..n {
                        let (c, s) = p.row(r);
                        out[(r, c)] += w * s as f64;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Max over all pairs of `‖e_i e_j + e_j e_i + 2δ_ij Id‖_max`; exactly zero
    /// for a valid integer system.
    pub fn anticommutator_defect(&self) -> f64 {
        let m = self.generators();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in i..m {
                let a = self.gammas[i].compose(&self.gammas[j]).to_dense();
                let b = self.gammas[j].compose(&self.gammas[i]).to_dense();
                let mut s = a + b;
                if i == j {
                    s += DMatrix::identity(self.module_dim(), self.module_dim()) * 2.0;
                }
                worst = worst.max(s.amax());
            }
        }
        worst
    }

    /// Max of `‖e_i + e_iᵀ‖` and `‖e_i e_iᵀ - I‖`.
    pub fn skew_orthogonal_defect(&self) -> f64 {
        let n = self.module_dim();
        self.gammas
            .iter()
            .map(|g| {
                let d = g.to_dense();
                let skew = (&d + d.transpose()).amax();
                let orth = (&d * d.transpose() - DMatrix::identity(n, n)).amax();
                skew.max(orth)
            })
            .fold(0.0, f64::max)
    }

    /// Expected sign of `volume²`: `(-1)^{m(m+1)/2}`.
    pub fn volume_square_sign(&self) -> i8 {
        let m = self.generators();
        if (m * (m + 1) / 2).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Eigenspace split of the volume element; needs `volume² = +Id`.
    pub fn half_spinor_split(&self) -> Result<HalfSpinorSplit> {
        if self.volume_square_sign() != 1 {
            return Err(GksError::Malformed(format!(
                "volume element of Cl_{} squares to -Id; no real ±1 split",
                self.generators()
            )));
        }
        Ok(HalfSpinorSplit::from_involution(&self.volume_dense()))
    }
}

/// Radon–Hurwitz number `ρ(q)`: with `q = 2^{4a+b}·odd`, `ρ = 8a + 2^b`.
pub fn radon_hurwitz_number(q: usize) -> usize {
    assert!(q >= 1);
    let k = q.trailing_zeros() as usize;
    let (a, b) = (k / 4, k % 4);
    8 * a + (1 << b)
}

/// Whether `Cl_p` admits a module structure on `ℝ^q` (`p ≤ ρ(q) - 1`).
pub fn radon_hurwitz_admissible(p: usize, q: usize) -> bool {
    q >= 1 && p < radon_hurwitz_number(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cl1_is_the_standard_complex_structure() {
        let rep = build_rep(1).unwrap();
        assert_eq!(rep.module_dim(), 2);
        let e1 = rep.gamma_dense(0);
        assert_eq!(e1, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
    }

    #[test]
    fn every_rep_satisfies_clifford_relations_exactly() {
        for m in 1..=16 {
            let rep = build_rep(m).unwrap();
            assert_eq!(rep.module_dim(), MODULE_DIMS[m - 1], "m = {m}");
            assert_eq!(rep.anticommutator_defect(), 0.0, "m = {m}");
            assert_eq!(rep.skew_orthogonal_defect(), 0.0, "m = {m}");
            let v2 = rep.volume().compose(rep.volume());
            assert!(v2.is_identity_scaled(rep.volume_square_sign()), "m = {m}");
        }
    }

    #[test]
    fn cl8_half_spinors_have_rank_eight() {
        let rep = build_rep(8).unwrap();
        let split = rep.half_spinor_split().unwrap();
        assert_eq!(split.rank_plus(), 8);
        assert_eq!(split.rank_minus(), 8);
        assert_eq!(split.basis_plus().ncols(), 8);
        let v = rep.volume_dense();
        assert!((&v * &split.proj_plus - &split.proj_plus).amax() < 1e-15);
        assert!((&split.proj_plus * &split.proj_minus).amax() < 1e-15);
    }

    #[test]
    fn out_of_range_generator_count() {
        assert!(matches!(build_rep(0), Err(GksError::OutOfRange { .. })));
        assert!(matches!(build_rep(17), Err(GksError::OutOfRange { .. })));
    }

    #[test]
    fn two_form_of_a_vector_with_itself_vanishes() {
        let rep = build_rep(5).unwrap();
        let e1 = [1.0, 0.0, 0.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0, 0.0, 0.0];
        assert!(rep.two_form_action(&e1, &e1).unwrap().amax() < 1e-15);
        let w = rep.two_form_action(&e1, &e2).unwrap();
        assert_eq!(w, rep.gamma_dense(0) * rep.gamma_dense(1));
        assert!((&w + w.transpose()).amax() < 1e-15);
        assert!(matches!(
            rep.two_form_action(&e1, &[1.0]),
            Err(GksError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn octonion_units_square_to_minus_one() {
        for u in 1..8 {
            let l = cayley_dickson_left(8, u);
            assert!(l.compose(&l).is_identity_scaled(-1));
            let r = cayley_dickson_right(8, u);
            assert!(r.compose(&r).is_identity_scaled(-1));
        }
    }

    #[test]
    fn radon_hurwitz_values() {
        let expected = [(1, 1), (2, 2), (4, 4), (6, 2), (8, 8), (16, 9), (32, 10), (64, 12), (128, 16), (256, 17)];
        for (q, rho) in expected {
            assert_eq!(radon_hurwitz_number(q), rho, "q = {q}");
        }
        assert!(radon_hurwitz_admissible(3, 4));
        assert!(radon_hurwitz_admissible(7, 8));
        assert!(radon_hurwitz_admissible(1, 2));
        assert!(!radon_hurwitz_admissible(5, 6));
        assert!(!radon_hurwitz_admissible(15, 16));
    }
}
