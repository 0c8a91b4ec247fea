use std::f64::consts::TAU;

use rand::RngCore;

use super::geometry::ellipse_point;
use super::shrink::{da_shrink, Bracket};
use super::{ChainState, SamplerConfig};
use crate::ledger::EvalLedger;
use crate::rng::uniform;
use crate::target::{Factor, FactorizedTarget, Levels, ReferenceMeasure};
use crate::{Error, Result};

/// One transition of delayed-acceptance elliptical slice sampling.
///
/// Requires a Gaussian reference `N(0, C)`. Draws the levels, an auxiliary
/// `v ~ N(0, C)` and an angle `theta ~ U(0, 2 pi)`, then shrinks the angle
/// bracket `(theta - 2 pi, theta)` towards 0 with the coarse check first.
pub fn step_da_ess<R: RngCore + ?Sized>(
    target: &FactorizedTarget,
    state: &ChainState,
    config: &SamplerConfig,
    rng: &mut R,
    ledger: &mut EvalLedger,
) -> Result<ChainState> {
    let ReferenceMeasure::Gaussian(prior) = target.reference() else {
        return Err(Error::InvalidReference(format!(
            "elliptical slice sampling needs a Gaussian reference, got {}",
            target.reference().name()
        )));
    };
    let levels = Levels::draw(state.log_coarse, state.log_fine, rng);
    let v = prior.sample(rng);
    let theta = TAU * uniform(rng);

    let mut coarse_at = f64::NAN;
    let mut fine_at = f64::NAN;
    let theta = {
        let ledger = std::cell::RefCell::new(&mut *ledger);
        da_shrink(
            |th| {
                let y = ellipse_point(&state.x, &v, th)?;
                let c = target.check(Factor::Coarse, &y, levels.log_s, &mut ledger.borrow_mut())?;
                coarse_at = c.log_value;
                Ok(c.passed)
            },
            |th| {
                let y = ellipse_point(&state.x, &v, th)?;
                let f = target.check(Factor::Fine, &y, levels.log_t, &mut ledger.borrow_mut())?;
                fine_at = f.log_value;
                Ok(f.passed)
            },
            Bracket {
                l: theta - TAU,
                r: theta,
                anchor: 0.0,
            },
            theta,
            rng,
            config.max_shrink,
        )?
    };
    Ok(ChainState {
        x: ellipse_point(&state.x, &v, theta)?,
        log_coarse: coarse_at,
        log_fine: fine_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};
    use crate::target::{DensityFactor, GaussianReference};

    fn gaussian_target() -> FactorizedTarget {
        FactorizedTarget::new(
            ReferenceMeasure::Gaussian(GaussianReference::isotropic(2, 4.0).unwrap()),
            DensityFactor::new(2, |x| -0.375 * (x[0] * x[0] + x[1] * x[1])),
            DensityFactor::new(2, |x| x[0].abs() + x[1].abs()),
        )
        .unwrap()
    }

    #[test]
    fn output_lies_in_both_slices() {
        let target = gaussian_target();
        let mut ledger = EvalLedger::new();
        let mut state = ChainState::new(&target, vec![0.1, -0.2], &mut ledger).unwrap();
        let mut rng = stream_rng(1, Stream::Chain);
        for _ in 0..2000 {
            let mut level_rng = rng.clone();
            let levels = Levels::draw(state.log_coarse, state.log_fine, &mut level_rng);
            let next = step_da_ess(
                &target,
                &state,
                &SamplerConfig::default(),
                &mut rng,
                &mut ledger,
            )
            .unwrap();
            assert!(next.log_coarse > levels.log_s);
            assert!(next.log_fine > levels.log_t);
            assert_eq!(next.log_coarse, target.coarse().log_value(&next.x));
            assert_eq!(next.log_fine, target.fine_ratio().log_value(&next.x));
            state = next;
        }
    }

    #[test]
    fn first_angle_accepted_costs_one_of_each() {
        // flat factors: every candidate passes
        let target = FactorizedTarget::new(
            ReferenceMeasure::Gaussian(GaussianReference::isotropic(2, 1.0).unwrap()),
            DensityFactor::zero(2),
            DensityFactor::zero(2),
        )
        .unwrap();
        let mut ledger = EvalLedger::new();
        let state = ChainState::new(&target, vec![0.3, 0.3], &mut ledger).unwrap();
        let before = ledger.counts();
        let mut rng = stream_rng(2, Stream::Chain);
        step_da_ess(
            &target,
            &state,
            &SamplerConfig::default(),
            &mut rng,
            &mut ledger,
        )
        .unwrap();
        let used = ledger.counts().since(before);
        assert_eq!((used.coarse, used.fine), (1, 1));
    }

    #[test]
    fn rejects_non_gaussian_reference() {
        let target = FactorizedTarget::new(
            ReferenceMeasure::lebesgue(1).unwrap(),
            DensityFactor::zero(1),
            DensityFactor::zero(1),
        )
        .unwrap();
        let mut ledger = EvalLedger::new();
        let state = ChainState::new(&target, vec![0.0], &mut ledger).unwrap();
        let mut rng = stream_rng(3, Stream::Chain);
        assert!(matches!(
            step_da_ess(
                &target,
                &state,
                &SamplerConfig::default(),
                &mut rng,
                &mut ledger
            ),
            Err(Error::InvalidReference(_))
        ));
    }
}
