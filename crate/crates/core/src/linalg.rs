//! Dense Hermitian helpers.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.norm()))
}

/// `max |m_ij - conj(m_ji)| / max(1, max |m_ij|)`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut defect: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    defect / max_abs(m).max(1.0)
}

/// Sorted eigenvalues of a Hermitian matrix. Rejects matrices whose
/// Hermitian defect exceeds `1e-14` relative.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Length {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let defect = hermitian_defect(m);
    if defect > 1e-14 {
        return Err(Error::NotHermitian { defect });
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let eig = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000 * m.nrows().max(1))
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(
            "eigensolver produced non-finite eigenvalues".into(),
        ));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn real_diagonal(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(values[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Singular values of a Hermitian matrix, descending.
pub fn hermitian_singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    let mut s: Vec<f64> = hermitian_eigenvalues(m)?
        .into_iter()
        .map(f64::abs)
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}
