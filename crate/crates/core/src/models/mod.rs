//! Concrete targets: the one-dimensional example, a Bayesian inverse problem
//! with a trapezoidal forward map, and subsampled logistic regression.

mod adjust;
pub mod bip;
pub mod example1d;
pub mod logreg;

use serde::{Deserialize, Serialize};

pub use adjust::reference_adjust;

use crate::target::{DensityFactor, FactorizedTarget, GaussianReference, ReferenceMeasure};
use crate::Result;

/// How a model with a Gaussian prior is presented to the samplers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorReference {
    /// The prior is the reference measure; factors are likelihoods only.
    #[default]
    Gaussian,
    /// Lebesgue reference; the prior density is folded into the cheap factor.
    Lebesgue,
    /// Polar reference; prior density and `|x|^(d-1)` go into the cheap factor.
    Polar,
}

impl PriorReference {
    fn measure(self, prior: &GaussianReference) -> Result<ReferenceMeasure> {
        let dim = prior.dim();
        match self {
            PriorReference::Gaussian => Ok(ReferenceMeasure::Gaussian(prior.clone())),
            PriorReference::Lebesgue => ReferenceMeasure::lebesgue(dim),
            PriorReference::Polar => ReferenceMeasure::polar(dim),
        }
    }
}

/// Assembles a target from a cheap log-likelihood and, for the delayed
/// variant, the log ratio of the expensive to the cheap likelihood.
///
/// With `ratio = None` the result is the trivial factorization of `coarse`,
/// i.e. the plain sampler's target. The reference adjustment only touches the
/// cheap factor, so the ratio is the same under every reference.
pub fn prior_target(
    coarse: DensityFactor,
    ratio: Option<DensityFactor>,
    prior: &GaussianReference,
    choice: PriorReference,
) -> Result<FactorizedTarget> {
    let reference = choice.measure(prior)?;
    let coarse = match choice {
        PriorReference::Gaussian => coarse,
        _ => reference_adjust(&coarse, Some(prior), &reference)?,
    };
    match ratio {
        Some(ratio) => FactorizedTarget::new(reference, coarse, ratio),
        None => FactorizedTarget::trivial_factorization(coarse, reference),
    }
}
