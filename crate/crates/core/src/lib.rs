//! Delayed-acceptance slice sampling.
//!
//! Targets are factorized as `rho = rho_hat * rho_app` over a reference
//! measure. The cheap factor `rho_app` is always checked first; the
//! expensive ratio `rho_hat` is only evaluated at points that already lie in
//! the cheap superlevel set. Every evaluation goes through an [`EvalLedger`]
//! so samplers can be compared by cost as well as by effective sample size.
//!
//! Kernels provided in [`samplers`]:
//!
//! * delayed-acceptance Metropolis-Hastings ([`samplers::step_da_mh`]),
//! * delayed-acceptance ideal slice sampling ([`samplers::step_da_ideal`]),
//! * delayed-acceptance elliptical slice sampling ([`samplers::step_da_ess`]),
//! * delayed-acceptance hit-and-run uniform slice sampling ([`samplers::step_da_hruss`]),
//! * delayed-acceptance Gibbsian polar slice sampling ([`samplers::step_da_gpss`]).
//!
//! Running any of them on [`FactorizedTarget::trivial_factorization`] gives
//! the plain (non-delayed) sampler.

pub mod batch;
pub mod diagnostics;
mod error;
pub mod ledger;
pub mod linalg;
pub mod models;
pub mod rng;
pub mod samplers;
pub mod target;

pub use error::{Error, Result};
pub use ledger::{EvalCounts, EvalLedger, TraceEvent};
pub use target::{
    Check, DensityFactor, Factor, FactorizedTarget, GaussianReference, Levels, ReferenceMeasure,
};
