//! Bayesian inverse problem: recover the coefficient field
//! `u(tau, x) = sqrt(2)/pi * sum_k x_k sin(k pi tau)` of
//! `-(e^u q')' = 0, q(0) = 0, q(1) = 2` from noisy observations of `q` at
//! `tau = 0.25, 0.5, 0.75`. The solution `q(tau) = 2 S_tau / S_1` with
//! `S_tau = int_0^tau e^{-u}` is computed by the trapezoidal rule on a grid of
//! size `h`; coarser grids give the cheap factor.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::{prior_target, PriorReference};
use crate::rng::{standard_normal, stream_rng, Stream};
use crate::target::{DensityFactor, FactorizedTarget, GaussianReference};
use crate::{Error, Result};

pub const OBS_TIMES: [f64; 3] = [0.25, 0.5, 0.75];
pub const DEFAULT_DIM: usize = 10;
pub const DEFAULT_SIGMA2: f64 = 0.01;
pub const DEFAULT_H_REF: f64 = 1.0 / 512.0;

/// `u(tau, x)`.
pub fn bip_u(tau: f64, x: &[f64]) -> f64 {
    let theta = PI * tau;
    SQRT_2 / PI
        * x.iter()
            .enumerate()
            .map(|(k, xk)| xk * ((k + 1) as f64 * theta).sin())
            .sum::<f64>()
}

/// Number of grid intervals `1/h`, which must be a power of two `>= 4` so
/// the observation times are nodes.
pub fn grid_intervals(h: f64) -> Result<usize> {
    if !(h > 0.0 && h <= 0.25) {
        return Err(Error::InvalidGridSize(h));
    }
    let n = 1.0 / h;
    if n > (1u64 << 40) as f64 || n.fract() != 0.0 || !(n as u64).is_power_of_two() {
        return Err(Error::InvalidGridSize(h));
    }
    Ok(n as usize)
}

/// `u` at the nodes `i / n`, using the sine recurrence
/// `sin((k+1)t) = 2 cos(t) sin(kt) - sin((k-1)t)`.
fn u_on_grid(x: &[f64], n: usize) -> Vec<f64> {
    let c = SQRT_2 / PI;
    (0..=n)
        .map(|i| {
            let t = PI * i as f64 / n as f64;
            let two_cos = 2.0 * t.cos();
            let (mut prev, mut cur) = (0.0, t.sin());
            let mut acc = 0.0;
            for xk in x {
                acc += xk * cur;
                let next = two_cos * cur - prev;
                prev = cur;
                cur = next;
            }
            c * acc
        })
        .collect()
}

/// `F_h(x) = (q(0.25), q(0.5), q(0.75))` with trapezoidal `S_tau`.
pub fn bip_forward(x: &[f64], h: f64) -> Result<[f64; 3]> {
    let n = grid_intervals(h)?;
    Ok(forward_on(x, n))
}

fn forward_on(x: &[f64], n: usize) -> [f64; 3] {
    let e: Vec<f64> = u_on_grid(x, n).iter().map(|u| (-u).exp()).collect();
    let quarter = n / 4;
    let mut s = [0.0; 4];
    let mut acc = 0.0;
    for (i, w) in e.windows(2).enumerate() {
        acc += 0.5 * (w[0] + w[1]);
        if (i + 1) % quarter == 0 {
            s[(i + 1) / quarter - 1] = acc;
        }
    }
    [2.0 * s[0] / s[3], 2.0 * s[1] / s[3], 2.0 * s[2] / s[3]]
}

/// `f(x) = int_0^1 e^{u(tau, x)} dtau` by the trapezoidal rule with grid
/// size `h` (the reference grid in experiments).
pub fn bip_qoi(x: &[f64], h: f64) -> Result<f64> {
    let n = grid_intervals(h)?;
    let e: Vec<f64> = u_on_grid(x, n).iter().map(|u| u.exp()).collect();
    let inner: f64 = e[1..n].iter().sum();
    Ok((inner + 0.5 * (e[0] + e[n])) / n as f64)
}

/// Prior `N(0, diag(k^-2))`.
pub fn bip_prior(dim: usize) -> Result<GaussianReference> {
    GaussianReference::diagonal((1..=dim).map(|k| 1.0 / (k * k) as f64).collect())
}

/// Persisted synthetic data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipData {
    pub seed: u64,
    pub sigma2: f64,
    pub h_ref: f64,
    pub x_true: Vec<f64>,
    pub delta: [f64; 3],
}

/// Draws `x_true` from the prior and `delta = F_{h_ref}(x_true) + N(0, sigma2 I)`.
/// `sigma2 = 0` gives noise-free data.
pub fn bip_generate_data(seed: u64, dim: usize, sigma2: f64, h_ref: f64) -> Result<BipData> {
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise variance {sigma2} is invalid"
        )));
    }
    let mut rng = stream_rng(seed, Stream::Data);
    let x_true = bip_prior(dim)?.sample(&mut rng);
    let clean = bip_forward(&x_true, h_ref)?;
    let sigma = sigma2.sqrt();
    let delta = clean.map(|q| q + sigma * standard_normal(&mut rng));
    Ok(BipData {
        seed,
        sigma2,
        h_ref,
        x_true,
        delta,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipModel {
    dim: usize,
    sigma2: f64,
    h_ref: f64,
    delta: [f64; 3],
    prior: GaussianReference,
}

impl BipModel {
    pub fn new(dim: usize, sigma2: f64, h_ref: f64, delta: [f64; 3]) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be positive, got {sigma2}"
            )));
        }
        grid_intervals(h_ref)?;
        Ok(Self {
            dim,
            sigma2,
            h_ref,
            delta,
            prior: bip_prior(dim)?,
        })
    }

    pub fn from_data(data: &BipData) -> Result<Self> {
        Self::new(data.x_true.len(), data.sigma2, data.h_ref, data.delta)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h_ref(&self) -> f64 {
        self.h_ref
    }

    pub fn prior(&self) -> &GaussianReference {
        &self.prior
    }

    /// `-|delta - F_h(x)|^2 / (2 sigma2)`.
    pub fn log_likelihood(&self, x: &[f64], h: f64) -> Result<f64> {
        let n = grid_intervals(h)?;
        Ok(self.log_likelihood_on(x, n))
    }

    fn log_likelihood_on(&self, x: &[f64], n: usize) -> f64 {
        let f = forward_on(x, n);
        let r2: f64 = f
            .iter()
            .zip(&self.delta)
            .map(|(f, d)| (d - f).powi(2))
            .sum();
        -r2 / (2.0 * self.sigma2)
    }

    /// Quantity of interest on the reference grid.
    pub fn qoi(&self, x: &[f64]) -> f64 {
        bip_qoi(x, self.h_ref).expect("reference grid validated at construction")
    }

    /// Target for `pi_{h_ref}`. With `h = Some(_)` the cheap factor is the
    /// likelihood on grid `h` (cost `1/h + 1` nodes) and the expensive ratio
    /// needs both grids; with `h = None` it is the plain target whose only
    /// factor is the reference-grid likelihood.
    pub fn target(&self, h: Option<f64>, reference: PriorReference) -> Result<FactorizedTarget> {
        let n_ref = grid_intervals(self.h_ref)?;
        let dim = self.dim;
        let cost_ref = (n_ref + 1) as f64;
        match h {
            None => {
                let m = self.clone();
                let full = DensityFactor::new(dim, move |x| m.log_likelihood_on(x, n_ref))
                    .with_cost(cost_ref);
                prior_target(full, None, &self.prior, reference)
            }
            Some(h) => {
                let n = grid_intervals(h)?;
                let cost = (n + 1) as f64;
                let m = self.clone();
                let coarse =
                    DensityFactor::new(dim, move |x| m.log_likelihood_on(x, n)).with_cost(cost);
                let m = self.clone();
                let ratio = DensityFactor::new(dim, move |x| {
                    m.log_likelihood_on(x, n_ref) - m.log_likelihood_on(x, n)
                })
                .with_cost(cost_ref + cost);
                prior_target(coarse, Some(ratio), &self.prior, reference)
            }
        }
    }
}
