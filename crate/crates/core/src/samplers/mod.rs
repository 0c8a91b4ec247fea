//! Transition kernels, their shared subroutines, and the chain runner.
//!
//! Every kernel carries the factor values at the current state in a
//! [`ChainState`], so the level draw does not re-evaluate the target. The
//! values at the next state come from the superlevel checks that accepted it.

mod chain;
mod ess;
mod geometry;
mod gpss;
mod hruss;
mod ideal;
mod mh;
mod shrink;
mod step_out;
mod tuning;

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::ledger::EvalLedger;
use crate::target::{Factor, FactorizedTarget};
use crate::{Error, Result};

pub use chain::{run_chain, ChainResult, SampleMatrix};
pub use ess::step_da_ess;
pub use geometry::{ellipse_point, sample_orth_sphere, sample_unit_sphere};
pub use gpss::step_da_gpss;
pub use hruss::step_da_hruss;
pub use ideal::step_da_ideal;
pub use mh::{step_da_mh, step_da_mh_counted, AcceptStats};
pub use shrink::{da_shrink, da_shrink_observed, Bracket};
pub use step_out::{step_out, step_out_at};
pub use tuning::{tune_mh_step, MhTuning, TuningOptions};

/// Step sizes and safety caps shared by all kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    /// Stepping-out interval width.
    pub w: f64,
    /// Random-walk proposal scale for DA-MH.
    pub mh_step: f64,
    pub max_expand: usize,
    pub max_shrink: usize,
    pub max_reject: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            w: 1.0,
            mh_step: 1.0,
            max_expand: 10_000,
            max_shrink: 10_000,
            max_reject: 1_000_000,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.w > 0.0 && self.w.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "w = {} must be positive",
                self.w
            )));
        }
        if !(self.mh_step > 0.0 && self.mh_step.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mh_step = {} must be positive",
                self.mh_step
            )));
        }
        if self.max_expand == 0 || self.max_shrink == 0 || self.max_reject == 0 {
            return Err(Error::InvalidArgument("safety caps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Current point together with its cached factor values.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub x: Vec<f64>,
    pub log_coarse: f64,
    pub log_fine: f64,
}

impl ChainState {
    /// Evaluates both factors at `x`; fails if `x` is outside the support.
    pub fn new(target: &FactorizedTarget, x: Vec<f64>, ledger: &mut EvalLedger) -> Result<Self> {
        let log_coarse = target.eval(Factor::Coarse, &x, ledger)?;
        let log_fine = target.eval(Factor::Fine, &x, ledger)?;
        for (factor, v) in [(Factor::Coarse, log_coarse), (Factor::Fine, log_fine)] {
            if v == f64::NEG_INFINITY {
                return Err(Error::OutOfSupport { factor });
            }
        }
        Ok(Self {
            x,
            log_coarse,
            log_fine,
        })
    }

    pub fn log_rho(&self) -> f64 {
        self.log_coarse + self.log_fine
    }
}

/// The available transition kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    DaMh,
    DaIdeal,
    DaEss,
    DaHruss,
    DaGpss,
}

impl Kernel {
    pub const ALL: [Kernel; 5] = [
        Kernel::DaMh,
        Kernel::DaIdeal,
        Kernel::DaEss,
        Kernel::DaHruss,
        Kernel::DaGpss,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::DaMh => "da_mh",
            Kernel::DaIdeal => "da_ideal",
            Kernel::DaEss => "da_ess",
            Kernel::DaHruss => "da_hruss",
            Kernel::DaGpss => "da_gpss",
        }
    }

    /// One transition from `state`.
    pub fn step<R: RngCore>(
        self,
        target: &FactorizedTarget,
        state: &ChainState,
        config: &SamplerConfig,
        rng: &mut R,
        ledger: &mut EvalLedger,
        accept: &mut AcceptStats,
    ) -> Result<ChainState> {
        ledger.begin_transition(&state.x);
        match self {
            Kernel::DaMh => step_da_mh_counted(target, state, config, rng, ledger, accept),
            Kernel::DaIdeal => step_da_ideal(target, state, config, rng, ledger),
            Kernel::DaEss => step_da_ess(target, state, config, rng, ledger),
            Kernel::DaHruss => step_da_hruss(target, state, config, rng, ledger),
            Kernel::DaGpss => step_da_gpss(target, state, config, rng, ledger),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kernel::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown kernel {s:?}")))
    }
}
