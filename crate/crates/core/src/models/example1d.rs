//! The one-dimensional target `rho(x) = exp(|x| - x^2 / 2)` factorized as
//! `rho_app(x) = exp(-x^2 / 2)` and `rho_hat(x) = exp(|x|)`, plus product
//! extensions to higher dimensions under each reference measure.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::reference_adjust;
use crate::rng::{standard_normal_vec, uniform, uniform_in};
use crate::target::{DensityFactor, FactorizedTarget, GaussianReference, ReferenceMeasure};
use crate::{Error, Result};

/// Half-width of the quadrature window of [`example1d_true_cdf`].
pub const CDF_WINDOW: f64 = 8.0;
/// Smallest accepted quadrature node count.
pub const MIN_CDF_NODES: usize = 10_000;

/// Unnormalized log density `|x| - x^2 / 2`.
pub fn log_density(x: f64) -> f64 {
    x.abs() - 0.5 * x * x
}

/// Half-width `sqrt(-2 log s)` of the cheap slice `{x : -x^2/2 > log s}`.
pub fn slice_half_width(log_s: f64) -> f64 {
    (-2.0 * log_s).max(0.0).sqrt()
}

/// The one-dimensional factorized target with its exact slice sampler
/// `U(-a, a)`.
pub fn target() -> FactorizedTarget {
    let coarse = DensityFactor::new(1, |x| -0.5 * x[0] * x[0]);
    let fine = DensityFactor::new(1, |x| x[0].abs());
    FactorizedTarget::new(ReferenceMeasure::Lebesgue { dim: 1 }, coarse, fine)
        .expect("dimensions agree")
        .with_direct_sampler(|log_s, rng| {
            let a = slice_half_width(log_s);
            vec![uniform_in(rng, -a, a)]
        })
}

/// Same density with `rho_app = rho` and `rho_hat = 1`.
pub fn plain_target() -> FactorizedTarget {
    FactorizedTarget::trivial_factorization(
        DensityFactor::new(1, |x| log_density(x[0])),
        ReferenceMeasure::Lebesgue { dim: 1 },
    )
    .expect("dimensions agree")
    .with_direct_sampler(|log_s, rng| {
        // {|x| - x^2/2 > log s} = {|x| < 1 + sqrt(1 - 2 log s)} for log s < 0,
        // minus the band around 0 when log s > 0
        let b = 1.0 + (1.0 - 2.0 * log_s).max(0.0).sqrt();
        let inner = if log_s > 0.0 {
            1.0 - (1.0 - 2.0 * log_s).max(0.0).sqrt()
        } else {
            0.0
        };
        let x = uniform_in(rng, inner, b);
        vec![if uniform(rng) < 0.5 { -x } else { x }]
    })
}

/// Reference measure of a product extension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceKind {
    Lebesgue,
    /// Isotropic `N(0, variance I)`; the cheap factor divides it back out.
    Gaussian {
        variance: f64,
    },
    Polar,
}

/// `prod_i rho(x_i)` in `dim` dimensions. Every coordinate has the
/// one-dimensional marginal. The expensive factor is `sum_i |x_i|` under
/// every reference; the cheap factor carries the reference correction.
pub fn product_target(dim: usize, kind: ReferenceKind) -> Result<FactorizedTarget> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let gauss = DensityFactor::new(dim, |x| -0.5 * x.iter().map(|v| v * v).sum::<f64>());
    let fine = DensityFactor::new(dim, |x| x.iter().map(|v| v.abs()).sum());
    match kind {
        ReferenceKind::Lebesgue => Ok(FactorizedTarget::new(
            ReferenceMeasure::lebesgue(dim)?,
            gauss,
            fine,
        )?
        .with_direct_sampler(move |log_s, rng| uniform_ball(dim, slice_half_width(log_s), rng))),
        ReferenceKind::Gaussian { variance } => {
            let reference = GaussianReference::isotropic(dim, variance)?;
            let k = 0.5 / variance - 0.5;
            let coarse = DensityFactor::new(dim, move |x| k * x.iter().map(|v| v * v).sum::<f64>());
            FactorizedTarget::new(ReferenceMeasure::Gaussian(reference), coarse, fine)
        }
        ReferenceKind::Polar => {
            let reference = ReferenceMeasure::polar(dim)?;
            let coarse = reference_adjust(&gauss, None, &reference)?;
            FactorizedTarget::new(reference, coarse, fine)
        }
    }
}

fn uniform_ball(dim: usize, radius: f64, rng: &mut dyn RngCore) -> Vec<f64> {
    let z = standard_normal_vec(rng, dim);
    let n = crate::linalg::norm(&z);
    let r = radius * uniform(rng).powf(1.0 / dim as f64);
    z.iter().map(|v| v / n * r).collect()
}

/// CDF of the normalized one-dimensional target, by composite trapezoidal
/// quadrature on `[-8, 8]`.
#[derive(Debug, Clone)]
pub struct TrueCdf {
    /// Nodes on `[-8, 0]`.
    nodes: Vec<f64>,
    /// CDF at `nodes`; the right half follows from symmetry.
    values: Vec<f64>,
}

impl TrueCdf {
    pub fn cdf(&self, x: f64) -> f64 {
        if x > 0.0 {
            return 1.0 - self.cdf(-x);
        }
        if x == 0.0 {
            return 0.5;
        }
        if x <= -CDF_WINDOW {
            return 0.0;
        }
        let h = self.nodes[1] - self.nodes[0];
        let pos = (x + CDF_WINDOW) / h;
        let i = (pos.floor() as usize).min(self.nodes.len() - 2);
        let frac = pos - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Inverse of [`TrueCdf::cdf`] for `p` in `(0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        if p > 0.5 {
            return -self.quantile(1.0 - p);
        }
        if p <= 0.0 {
            return -CDF_WINDOW;
        }
        let j = self
            .values
            .partition_point(|v| *v < p)
            .clamp(1, self.values.len() - 1);
        let (v0, v1) = (self.values[j - 1], self.values[j]);
        let frac = if v1 > v0 { (p - v0) / (v1 - v0) } else { 0.0 };
        self.nodes[j - 1] + frac * (self.nodes[j] - self.nodes[j - 1])
    }
}

/// Builds [`TrueCdf`] with `nodes` grid points on `[-8, 8]`. The count is
/// rounded up to an odd number so that 0 is a node.
pub fn example1d_true_cdf(nodes: usize) -> Result<TrueCdf> {
    if nodes < MIN_CDF_NODES {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs at least {MIN_CDF_NODES} nodes, got {nodes}"
        )));
    }
    let half = nodes / 2;
    let h = CDF_WINDOW / half as f64;
    let grid: Vec<f64> = (0..=half).map(|i| -CDF_WINDOW + i as f64 * h).collect();
    let mut cum = Vec::with_capacity(grid.len());
    cum.push(0.0);
    for w in grid.windows(2) {
        let step = 0.5 * h * (log_density(w[0]).exp() + log_density(w[1]).exp());
        cum.push(cum.last().unwrap() + step);
    }
    let total = 2.0 * cum[half];
    let values = cum.iter().map(|c| c / total).collect();
    Ok(TrueCdf {
        nodes: grid,
        values,
    })
}
