//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Condition number above which inverses are reported as unreliable.
pub const CONDITION_WARNING: f64 = 1e12;

/// Solves `m x = b` for symmetric positive definite `m`, falling back to LU
/// when Cholesky fails from rounding.
pub(crate) fn solve_spd(m: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(chol) = m.clone().cholesky() {
        return Some(chol.solve(b));
    }
    m.clone().lu().solve(b)
}

/// Inverse of a symmetric positive definite matrix, warning when it is badly
/// conditioned.
pub(crate) fn inverse_spd(m: &DMatrix<f64>, what: &str) -> Option<DMatrix<f64>> {
    if m.nrows() == 0 {
        return Some(DMatrix::zeros(0, 0));
    }
    let cond = condition_number(m);
    if cond > CONDITION_WARNING {
        log::warn!("{what} has condition number {cond:e}");
    }
    match m.clone().cholesky() {
        Some(chol) => Some(chol.inverse()),
        None => m.clone().try_inverse(),
    }
}

/// Ratio of extreme absolute eigenvalues of a symmetric matrix.
pub(crate) fn condition_number(m: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(m.clone());
    let (lo, hi) = eig.eigenvalues.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
        (lo.min(v.abs()), hi.max(v.abs()))
    });
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Numerical rank of a symmetric matrix: eigenvalues above `tol * scale`
/// count, where `scale` is the natural magnitude of the matrix entries. A
/// fixed scale keeps a matrix of pure roundoff at rank 0.
pub(crate) fn symmetric_rank(m: &DMatrix<f64>, tol: f64, scale: f64) -> usize {
    if m.nrows() == 0 {
        return 0;
    }
    let eig = SymmetricEigen::new(m.clone());
    eig.eigenvalues.iter().filter(|v| v.abs() > tol * scale).count()
}

pub(crate) fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Symmetrizes in place to remove rounding asymmetry.
pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

pub(crate) mod matrix_rows {
    //! Serializes a `DMatrix<f64>` as a list of rows.
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }
}
