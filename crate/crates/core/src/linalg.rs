//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Orthonormal basis of the column span of `m`, by modified Gram–Schmidt over
/// the columns in order. Columns whose residual norm is below `tol` are skipped.
pub fn orthonormal_column_basis(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for c in 0..m.ncols() {
        let mut v = m.column(c).into_owned();
        for _ in 0..2 {
            for b in &basis {
                let d = b.dot(&v);
                v.axpy(-d, b, 1.0);
            }
        }
        let norm = v.norm();
        if norm > tol {
            basis.push(v / norm);
        }
    }
    if basis.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    DMatrix::from_columns(&basis)
}

/// Orthonormal basis of the null space of `m`, from the SVD.
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    // pad wide matrices so the SVD returns a full n×n right factor
    let padded = if m.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&i| svd.singular_values[i] < tol)
        .map(|i| vt.row(i).transpose())
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    orthonormal_column_basis(&DMatrix::from_columns(&cols), 1e-9)
}

/// Singular values of `m` in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank: singular values above `tol`.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    singular_values(m).iter().filter(|&&s| s > tol).count()
}

/// Sorted eigenvalues of the symmetric part of `m`.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let s = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// 2-norm condition number.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x.abs()) })
}
