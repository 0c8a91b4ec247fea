use std::cell::RefCell;

use rand::RngCore;

use super::geometry::sample_unit_sphere;
use super::shrink::da_shrink;
use super::step_out::step_out;
use super::{ChainState, SamplerConfig};
use crate::ledger::EvalLedger;
use crate::rng::uniform_in;
use crate::target::{Factor, FactorizedTarget, Levels, ReferenceMeasure};
use crate::{Error, Result};

fn line_point(x: &[f64], v: &[f64], p: f64) -> Vec<f64> {
    x.iter().zip(v).map(|(x, v)| x + p * v).collect()
}

/// One transition of delayed-acceptance hit-and-run uniform slice sampling.
///
/// Requires the Lebesgue reference. Stepping-out along the random line only
/// tests the coarse slice; the shrinkage then looks for a point of the coarse
/// slice that also lies in the fine one.
pub fn step_da_hruss<R: RngCore + ?Sized>(
    target: &FactorizedTarget,
    state: &ChainState,
    config: &SamplerConfig,
    rng: &mut R,
    ledger: &mut EvalLedger,
) -> Result<ChainState> {
    if !matches!(target.reference(), ReferenceMeasure::Lebesgue { .. }) {
        return Err(Error::InvalidReference(format!(
            "hit-and-run slice sampling needs the Lebesgue reference, got {}",
            target.reference().name()
        )));
    }
    let levels = Levels::draw(state.log_coarse, state.log_fine, rng);
    let v = sample_unit_sphere(target.dim(), rng)?;
    let x = &state.x;
    let ledger = RefCell::new(ledger);

    let bracket = step_out(
        |p| {
            target.in_superlevel(
                Factor::Coarse,
                &line_point(x, &v, p),
                levels.log_s,
                &mut ledger.borrow_mut(),
            )
        },
        0.0,
        config.w,
        None,
        rng,
        config.max_expand,
    )?;

    let p0 = uniform_in(rng, bracket.l, bracket.r);
    let mut coarse_at = f64::NAN;
    let mut fine_at = f64::NAN;
    let p = da_shrink(
        |p| {
            let c = target.check(
                Factor::Coarse,
                &line_point(x, &v, p),
                levels.log_s,
                &mut ledger.borrow_mut(),
            )?;
            coarse_at = c.log_value;
            Ok(c.passed)
        },
        |p| {
            let f = target.check(
                Factor::Fine,
                &line_point(x, &v, p),
                levels.log_t,
                &mut ledger.borrow_mut(),
            )?;
            fine_at = f.log_value;
            Ok(f.passed)
        },
        bracket,
        p0,
        rng,
        config.max_shrink,
    )?;
    Ok(ChainState {
        x: line_point(x, &v, p),
        log_coarse: coarse_at,
        log_fine: fine_at,
    })
}
