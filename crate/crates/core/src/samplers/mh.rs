use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{ChainState, SamplerConfig};
use crate::ledger::EvalLedger;
use crate::rng::{standard_normal_vec, uniform};
use crate::target::{Factor, FactorizedTarget};
use crate::Result;

/// Per-stage acceptance counts of delayed-acceptance Metropolis-Hastings.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptStats {
    pub proposed: u64,
    pub stage1_accepted: u64,
    pub stage2_accepted: u64,
}

impl AcceptStats {
    /// Fraction of proposals accepted by both stages.
    pub fn overall_rate(&self) -> f64 {
        if self.proposed == 0 {
            return 0.0;
        }
        self.stage2_accepted as f64 / self.proposed as f64
    }

    pub fn stage1_rate(&self) -> f64 {
        if self.proposed == 0 {
            return 0.0;
        }
        self.stage1_accepted as f64 / self.proposed as f64
    }
}

/// One DA-MH transition with a Gaussian random-walk proposal.
pub fn step_da_mh<R: RngCore + ?Sized>(
    target: &FactorizedTarget,
    state: &ChainState,
    config: &SamplerConfig,
    rng: &mut R,
    ledger: &mut EvalLedger,
) -> Result<ChainState> {
    step_da_mh_counted(
        target,
        state,
        config,
        rng,
        ledger,
        &mut AcceptStats::default(),
    )
}

/// [`step_da_mh`] that also updates acceptance counts.
///
/// Stage 1 accepts with `min(1, rho_app(y)/rho_app(x))`, i.e.
/// `log rho_app(y) > log rho_app(x) + log u1`; stage 2 is the same test on
/// `rho_hat` and only runs after stage 1 succeeded. Consumes `dim` normals,
/// then one or two uniforms.
pub fn step_da_mh_counted<R: RngCore + ?Sized>(
    target: &FactorizedTarget,
    state: &ChainState,
    config: &SamplerConfig,
    rng: &mut R,
    ledger: &mut EvalLedger,
    accept: &mut AcceptStats,
) -> Result<ChainState> {
    let z = standard_normal_vec(rng, target.dim());
    let y: Vec<f64> = state
        .x
        .iter()
        .zip(&z)
        .map(|(x, z)| x + config.mh_step * z)
        .collect();
    accept.proposed += 1;

    let u1 = uniform(rng);
    let c = target.check(Factor::Coarse, &y, state.log_coarse + u1.ln(), ledger)?;
    if !c.passed {
        return Ok(state.clone());
    }
    accept.stage1_accepted += 1;

    let u2 = uniform(rng);
    let f = target.check(Factor::Fine, &y, state.log_fine + u2.ln(), ledger)?;
    if !f.passed {
        return Ok(state.clone());
    }
    accept.stage2_accepted += 1;
    Ok(ChainState {
        x: y,
        log_coarse: c.log_value,
        log_fine: f.log_value,
    })
}
