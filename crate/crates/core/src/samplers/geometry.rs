use rand::RngCore;

use crate::linalg::{dot, norm};
use crate::rng::standard_normal_vec;
use crate::{Error, Result};

/// Uniform direction on the unit sphere in `dim` dimensions.
pub fn sample_unit_sphere<R: RngCore + ?Sized>(dim: usize, rng: &mut R) -> Result<Vec<f64>> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "sphere dimension must be >= 1".into(),
        ));
    }
    loop {
        let mut z = standard_normal_vec(rng, dim);
        let n = norm(&z);
        if n > 1e-300 {
            z.iter_mut().for_each(|v| *v /= n);
            return Ok(z);
        }
    }
}

/// Uniform direction on the great subsphere orthogonal to the unit vector `v0`.
pub fn sample_orth_sphere<R: RngCore + ?Sized>(v0: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let dim = v0.len();
    if dim < 2 {
        return Err(Error::InvalidArgument(
            "orthogonal sphere needs dimension >= 2".into(),
        ));
    }
    if (norm(v0) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument("v0 must be a unit vector".into()));
    }
    loop {
        let mut z = standard_normal_vec(rng, dim);
        // two Gram-Schmidt passes keep |v0 . z| at rounding level
        for _ in 0..2 {
            let p = dot(v0, &z);
            z.iter_mut().zip(v0).for_each(|(zi, vi)| *zi -= p * vi);
        }
        let n = norm(&z);
        if n > 1e-8 {
            z.iter_mut().for_each(|v| *v /= n);
            return Ok(z);
        }
    }
}

/// `cos(theta) x + sin(theta) v`.
pub fn ellipse_point(x: &[f64], v: &[f64], theta: f64) -> Result<Vec<f64>> {
    if x.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: v.len(),
        });
    }
    let (s, c) = theta.sin_cos();
    Ok(x.iter().zip(v).map(|(a, b)| c * a + s * b).collect())
}
