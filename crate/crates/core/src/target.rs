//! Factorized targets, reference measures, level draws and superlevel checks.
//!
//! All densities are handled in the log domain. A log value of `-inf` marks a
//! point outside the support: it is never inside any superlevel set.

use std::fmt;
use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::ledger::EvalLedger;
use crate::linalg;
use crate::rng::{standard_normal_vec, uniform};
use crate::{Error, Result};

/// Which factor of the target is being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    /// The cheap approximation `rho_app`.
    Coarse,
    /// The expensive ratio `rho_hat = rho / rho_app`.
    Fine,
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Coarse => f.write_str("coarse"),
            Factor::Fine => f.write_str("fine"),
        }
    }
}

/// Centered Gaussian `N(0, C)` with a cached Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianReference {
    dim: usize,
    diagonal: Option<Vec<f64>>,
    chol: Vec<f64>,
    log_det: f64,
}

impl GaussianReference {
    pub fn diagonal(variances: Vec<f64>) -> Result<Self> {
        let dim = variances.len();
        if dim == 0 {
            return Err(Error::InvalidReference("dimension must be positive".into()));
        }
        if let Some(v) = variances.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidReference(format!(
                "diagonal covariance entry {v} is not positive"
            )));
        }
        let mut chol = vec![0.0; dim * dim];
        for (i, v) in variances.iter().enumerate() {
            chol[i * dim + i] = v.sqrt();
        }
        let log_det = variances.iter().map(|v| v.ln()).sum();
        Ok(Self {
            dim,
            diagonal: Some(variances),
            chol,
            log_det,
        })
    }

    pub fn isotropic(dim: usize, variance: f64) -> Result<Self> {
        Self::diagonal(vec![variance; dim])
    }

    /// Dense row-major covariance.
    pub fn dense(dim: usize, covariance: &[f64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidReference("dimension must be positive".into()));
        }
        let chol = linalg::cholesky(dim, covariance)?;
        let log_det = 2.0 * (0..dim).map(|i| chol[i * dim + i].ln()).sum::<f64>();
        Ok(Self {
            dim,
            diagonal: None,
            chol,
            log_det,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z = standard_normal_vec(rng, self.dim);
        match &self.diagonal {
            Some(var) => z.iter().zip(var).map(|(z, v)| z * v.sqrt()).collect(),
            None => linalg::lower_mul(self.dim, &self.chol, &z),
        }
    }

    /// `log N(x; 0, C)`.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        let quad = match &self.diagonal {
            Some(var) => x.iter().zip(var).map(|(x, v)| x * x / v).sum::<f64>(),
            None => {
                let y = linalg::forward_solve(self.dim, &self.chol, x);
                linalg::dot(&y, &y)
            }
        };
        -0.5 * (self.dim as f64 * (2.0 * std::f64::consts::PI).ln() + self.log_det + quad)
    }
}

/// The base measure the unnormalized density is taken against.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceMeasure {
    Lebesgue {
        dim: usize,
    },
    Gaussian(GaussianReference),
    /// `||x||^(1-d) dx`.
    PolarLebesgue {
        dim: usize,
    },
}

impl ReferenceMeasure {
    pub fn lebesgue(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidReference("dimension must be positive".into()));
        }
        Ok(Self::Lebesgue { dim })
    }

    pub fn polar(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidReference(
                "polar reference needs dimension >= 2".into(),
            ));
        }
        Ok(Self::PolarLebesgue { dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Lebesgue { dim } | Self::PolarLebesgue { dim } => *dim,
            Self::Gaussian(g) => g.dim(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Lebesgue { .. } => "lebesgue",
            Self::Gaussian(_) => "gaussian",
            Self::PolarLebesgue { .. } => "polar",
        }
    }
}

pub type LogDensityFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Exact sampler of the reference measure restricted to `{rho_app > s}`,
/// given `log s`.
pub type DirectSliceSampler = dyn Fn(f64, &mut dyn RngCore) -> Vec<f64> + Send + Sync;

/// A deterministic log-density factor with a nominal per-evaluation cost.
#[derive(Clone)]
pub struct DensityFactor {
    dim: usize,
    cost_weight: f64,
    f: Arc<LogDensityFn>,
}

impl fmt::Debug for DensityFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityFactor")
            .field("dim", &self.dim)
            .field("cost_weight", &self.cost_weight)
            .finish_non_exhaustive()
    }
}

impl DensityFactor {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            dim,
            cost_weight: 1.0,
            f: Arc::new(f),
        }
    }

    /// The identically-zero log density (`rho_hat = 1`).
    pub fn zero(dim: usize) -> Self {
        Self::new(dim, |_| 0.0)
    }

    pub fn with_cost(mut self, cost_weight: f64) -> Self {
        assert!(cost_weight >= 0.0, "cost weight must be nonnegative");
        self.cost_weight = cost_weight;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cost_weight(&self) -> f64 {
        self.cost_weight
    }

    /// Raw evaluation, not counted.
    pub fn log_value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Result of one superlevel comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub log_value: f64,
    pub passed: bool,
}

/// Slice thresholds drawn at the current state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Levels {
    pub log_s: f64,
    pub log_t: f64,
}

impl Levels {
    /// Draws `log s = log rho_app(x) + log u1` and `log t = log rho_hat(x) + log u2`
    /// from already-known factor values. Consumes exactly two uniforms.
    pub fn draw<R: RngCore + ?Sized>(log_coarse: f64, log_fine: f64, rng: &mut R) -> Self {
        let u1 = uniform(rng);
        let u2 = uniform(rng);
        Self {
            log_s: log_coarse + u1.ln(),
            log_t: log_fine + u2.ln(),
        }
    }
}

/// `rho = rho_hat * rho_app` over a reference measure.
#[derive(Clone)]
pub struct FactorizedTarget {
    dim: usize,
    reference: ReferenceMeasure,
    coarse: DensityFactor,
    fine_ratio: DensityFactor,
    direct: Option<Arc<DirectSliceSampler>>,
    trivial: bool,
}

impl fmt::Debug for FactorizedTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FactorizedTarget")
            .field("dim", &self.dim)
            .field("reference", &self.reference.name())
            .field("coarse", &self.coarse)
            .field("fine_ratio", &self.fine_ratio)
            .field("direct", &self.direct.is_some())
            .field("trivial", &self.trivial)
            .finish()
    }
}

impl FactorizedTarget {
    pub fn new(
        reference: ReferenceMeasure,
        coarse: DensityFactor,
        fine_ratio: DensityFactor,
    ) -> Result<Self> {
        let dim = reference.dim();
        for got in [coarse.dim(), fine_ratio.dim()] {
            if got != dim {
                return Err(Error::DimensionMismatch { expected: dim, got });
            }
        }
        Ok(Self {
            dim,
            reference,
            coarse,
            fine_ratio,
            direct: None,
            trivial: false,
        })
    }

    /// `rho_app := rho`, `rho_hat := 1`. The fine factor is reported with
    /// cost weight 0, so plain samplers account coarse evaluations only.
    pub fn trivial_factorization(
        log_rho: DensityFactor,
        reference: ReferenceMeasure,
    ) -> Result<Self> {
        let dim = log_rho.dim();
        let mut target = Self::new(reference, log_rho, DensityFactor::zero(dim).with_cost(0.0))?;
        target.trivial = true;
        Ok(target)
    }

    /// The same density as a trivial factorization, `rho_app = rho`, under
    /// the same reference. The cost weight is the sum of both factors'. The
    /// direct slice sampler is not carried over since the slices change.
    pub fn collapsed(&self) -> Result<Self> {
        let coarse = self.coarse.clone();
        let fine = self.fine_ratio.clone();
        let cost = coarse.cost_weight() + fine.cost_weight();
        let full = DensityFactor::new(self.dim, move |x| coarse.log_value(x) + fine.log_value(x))
            .with_cost(cost);
        Self::trivial_factorization(full, self.reference.clone())
    }

    pub fn with_direct_sampler(
        mut self,
        sampler: impl Fn(f64, &mut dyn RngCore) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.direct = Some(Arc::new(sampler));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn reference(&self) -> &ReferenceMeasure {
        &self.reference
    }

    pub fn coarse(&self) -> &DensityFactor {
        &self.coarse
    }

    pub fn fine_ratio(&self) -> &DensityFactor {
        &self.fine_ratio
    }

    pub fn factor(&self, factor: Factor) -> &DensityFactor {
        match factor {
            Factor::Coarse => &self.coarse,
            Factor::Fine => &self.fine_ratio,
        }
    }

    /// True when built by [`Self::trivial_factorization`].
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    pub fn direct_sampler(&self) -> Option<&DirectSliceSampler> {
        self.direct.as_deref()
    }

    /// Cost weights `(coarse, fine)`.
    pub fn cost_weights(&self) -> (f64, f64) {
        (self.coarse.cost_weight(), self.fine_ratio.cost_weight())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    fn raw(&self, factor: Factor, x: &[f64]) -> Result<f64> {
        let v = self.factor(factor).log_value(x);
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::NonFinite { factor, value: v });
        }
        Ok(v)
    }

    /// Counted evaluation of one factor.
    pub fn eval(&self, factor: Factor, x: &[f64], ledger: &mut EvalLedger) -> Result<f64> {
        self.check_dim(x)?;
        let v = self.raw(factor, x)?;
        ledger.record(factor, x, None);
        Ok(v)
    }

    /// `log rho(x) = log rho_app(x) + log rho_hat(x)`; counts one evaluation
    /// of each factor.
    pub fn log_rho(&self, x: &[f64], ledger: &mut EvalLedger) -> Result<f64> {
        let c = self.eval(Factor::Coarse, x, ledger)?;
        let f = self.eval(Factor::Fine, x, ledger)?;
        Ok(c + f)
    }

    /// Strict superlevel comparison `log factor(y) > log_threshold`, returning
    /// the evaluated value as well.
    pub fn check(
        &self,
        factor: Factor,
        y: &[f64],
        log_threshold: f64,
        ledger: &mut EvalLedger,
    ) -> Result<Check> {
        self.check_dim(y)?;
        let log_value = self.raw(factor, y)?;
        let passed = log_value > log_threshold;
        ledger.record(factor, y, Some(passed));
        Ok(Check { log_value, passed })
    }

    pub fn in_superlevel(
        &self,
        factor: Factor,
        y: &[f64],
        log_threshold: f64,
        ledger: &mut EvalLedger,
    ) -> Result<bool> {
        Ok(self.check(factor, y, log_threshold, ledger)?.passed)
    }

    /// Evaluates both factors at `x` and draws the slice levels.
    pub fn draw_levels<R: RngCore + ?Sized>(
        &self,
        x: &[f64],
        rng: &mut R,
        ledger: &mut EvalLedger,
    ) -> Result<Levels> {
        let c = self.eval(Factor::Coarse, x, ledger)?;
        let f = self.eval(Factor::Fine, x, ledger)?;
        for (factor, v) in [(Factor::Coarse, c), (Factor::Fine, f)] {
            if v == f64::NEG_INFINITY {
                return Err(Error::OutOfSupport { factor });
            }
        }
        Ok(Levels::draw(c, f, rng))
    }
}
