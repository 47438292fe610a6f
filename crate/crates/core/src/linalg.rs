//! Small dense helpers on top of nalgebra's symmetric eigensolver.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Applies `f` to the eigenvalues of a symmetric matrix.
///
/// Fails with [`Error::NotPositiveDefinite`] if any eigenvalue is `<= floor`.
pub(crate) fn symmetric_function(
    m: &DMatrix<f64>,
    what: &'static str,
    floor: f64,
    f: impl Fn(f64) -> f64,
) -> Result<DMatrix<f64>> {
    let sym = symmetrize(m);
    let eig = SymmetricEigen::new(sym);
    let min = eig.eigenvalues.min();
    if !(min > floor) {
        return Err(Error::NotPositiveDefinite {
            what,
            min_eigenvalue: min,
        });
    }
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    Ok(symmetrize(&(v * d * v.transpose())))
}

pub(crate) fn sqrt_spd(m: &DMatrix<f64>, what: &'static str) -> Result<DMatrix<f64>> {
    symmetric_function(m, what, 0.0, f64::sqrt)
}

pub(crate) fn inv_sqrt_spd(m: &DMatrix<f64>, what: &'static str) -> Result<DMatrix<f64>> {
    symmetric_function(m, what, 0.0, |v| 1.0 / v.sqrt())
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

/// `max |m - I|` over all entries.
pub(crate) fn identity_deviation(m: &DMatrix<f64>) -> f64 {
    max_abs_diff(m, &DMatrix::identity(m.nrows(), m.ncols()))
}
