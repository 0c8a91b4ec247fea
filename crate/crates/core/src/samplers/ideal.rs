use rand::RngCore;

use super::{ChainState, SamplerConfig};
use crate::ledger::EvalLedger;
use crate::target::{Factor, FactorizedTarget, Levels};
use crate::{Error, Result};

/// One transition of delayed-acceptance ideal slice sampling.
///
/// Candidates are drawn exactly from the reference measure restricted to
/// `{rho_app > s}` and accepted once they also satisfy `rho_hat > t`; each
/// loop iteration costs one fine evaluation. The coarse value at the accepted
/// point is evaluated once so the next transition can reuse it.
pub fn step_da_ideal<R: RngCore>(
    target: &FactorizedTarget,
    state: &ChainState,
    config: &SamplerConfig,
    rng: &mut R,
    ledger: &mut EvalLedger,
) -> Result<ChainState> {
    let direct = target.direct_sampler().ok_or(Error::MissingDirectSampler)?;
    let levels = Levels::draw(state.log_coarse, state.log_fine, rng);
    for _ in 0..config.max_reject {
        let y = direct(levels.log_s, rng as &mut dyn RngCore);
        ledger.certify_coarse(&y);
        let fine = target.check(Factor::Fine, &y, levels.log_t, ledger)?;
        if fine.passed {
            let log_coarse = target.eval(Factor::Coarse, &y, ledger)?;
            return Ok(ChainState {
                x: y,
                log_coarse,
                log_fine: fine.log_value,
            });
        }
    }
    Err(Error::Exhausted {
        routine: "ideal slice rejection loop",
        cap: config.max_reject,
    })
}
