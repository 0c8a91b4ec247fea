//! Dense lower-triangular helpers for small covariance matrices.

use crate::{Error, Result};

/// Cholesky factor of a row-major symmetric positive-definite matrix.
pub fn cholesky(dim: usize, a: &[f64]) -> Result<Vec<f64>> {
    if a.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            got: a.len(),
        });
    }
    let mut l = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            if (a[i * dim + j] - a[j * dim + i]).abs() > 1e-12 * (1.0 + a[i * dim + j].abs()) {
                return Err(Error::InvalidReference(
                    "covariance is not symmetric".into(),
                ));
            }
            let mut sum = a[i * dim + j];
            for k in 0..j {
                sum -= l[i * dim + k] * l[j * dim + k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err(Error::InvalidReference(
                        "covariance is not positive definite".into(),
                    ));
                }
                l[i * dim + i] = sum.sqrt();
            } else {
                l[i * dim + j] = sum / l[j * dim + j];
            }
        }
    }
    Ok(l)
}

/// `L z` for lower-triangular `L`.
pub fn lower_mul(dim: usize, l: &[f64], z: &[f64]) -> Vec<f64> {
    (0..dim)
        .map(|i| (0..=i).map(|k| l[i * dim + k] * z[k]).sum())
        .collect()
}

/// Solves `L y = b` by forward substitution.
pub fn forward_solve(dim: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; dim];
    for i in 0..dim {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * dim + k] * y[k];
        }
        y[i] = sum / l[i * dim + i];
    }
    y
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
