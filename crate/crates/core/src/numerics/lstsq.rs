use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::qr::qr_decompose;
use crate::error::{Error, Result};

/// Result of an ordinary linear least-squares fit.
#[derive(Clone, Debug, PartialEq)]
pub struct LeastSquaresFit {
    pub coefficients: Vec<f64>,
    pub residual_sum_of_squares: f64,
    /// From the unbiased residual variance; infinite when there are no
    /// residual degrees of freedom.
    pub standard_errors: Vec<f64>,
}

/// Minimises `sum_i (y_i - sum_b c_b f_b(x_i))^2` where `basis[b][i] = f_b(x_i)`.
///
/// Solved through a QR factorisation of the design matrix.
pub fn linear_least_squares(basis: &[Vec<f64>], targets: &[f64]) -> Result<LeastSquaresFit> {
    let p = basis.len();
    let n = targets.len();
    if p == 0 {
        return Err(Error::InvalidArgument("least squares needs at least one basis function".into()));
    }
    if let Some(b) = basis.iter().position(|col| col.len() != n) {
        return Err(Error::InvalidArgument(format!(
            "basis function {b} has {} samples, expected {n}",
            basis[b].len()
        )));
    }
    if n < p {
        return Err(Error::FitDegenerate(format!(
            "{n} samples cannot determine {p} coefficients"
        )));
    }
    if targets.iter().chain(basis.iter().flatten()).any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("least-squares inputs must be finite".into()));
    }

    let design = ComplexMatrix::from_fn(n, p, |i, b| Complex64::new(basis[b][i], 0.0));
    let (q, r) = qr_decompose(&design).map_err(|e| match e {
        Error::DegenerateState(msg) => Error::FitDegenerate(format!("design matrix rank deficient: {msg}")),
        other => other,
    })?;

    // Q^T y, then back substitution
    let qty: Vec<f64> = (0..p)
        .map(|b| (0..n).map(|i| q[(i, b)].re * targets[i]).sum())
        .collect();
    let mut coefficients = vec![0.0; p];
    for i in (0..p).rev() {
        let tail: f64 = (i + 1..p).map(|j| r[(i, j)].re * coefficients[j]).sum();
        coefficients[i] = (qty[i] - tail) / r[(i, i)].re;
    }

    let rss: f64 = (0..n)
        .map(|i| {
            let fit: f64 = (0..p).map(|b| coefficients[b] * basis[b][i]).sum();
            (targets[i] - fit).powi(2)
        })
        .sum();

    // (X^T X)^{-1} = R^{-1} R^{-T}
    let mut r_inv = vec![vec![0.0; p]; p];
    for col in 0..p {
        for i in (0..=col).rev() {
            let rhs = if i == col { 1.0 } else { 0.0 };
            let tail: f64 = (i + 1..=col).map(|j| r[(i, j)].re * r_inv[j][col]).sum();
            r_inv[i][col] = (rhs - tail) / r[(i, i)].re;
        }
    }
    let dof = n - p;
    let standard_errors = (0..p)
        .map(|i| {
            if dof == 0 {
                return f64::INFINITY;
            }
            let var = rss / dof as f64;
            let diag: f64 = r_inv[i].iter().map(|x| x * x).sum();
            (var * diag).sqrt()
        })
        .collect();

    Ok(LeastSquaresFit {
        coefficients,
        residual_sum_of_squares: rss,
        standard_errors,
    })
}
