use std::cell::RefCell;
use std::f64::consts::TAU;

use rand::RngCore;

use super::geometry::{ellipse_point, sample_orth_sphere};
use super::shrink::{da_shrink, Bracket};
use super::step_out::step_out_at;
use super::{ChainState, SamplerConfig};
use crate::ledger::EvalLedger;
use crate::linalg::norm;
use crate::rng::{uniform, uniform_in};
use crate::target::{Factor, FactorizedTarget, Levels, ReferenceMeasure};
use crate::{Error, Result};

fn scaled(v: &[f64], r: f64) -> Vec<f64> {
    v.iter().map(|c| r * c).collect()
}

/// One transition of delayed-acceptance Gibbsian polar slice sampling.
///
/// Requires the polar reference `||x||^(1-d) dx` and `x != 0`. The direction
/// is updated on the great circle through `x / ||x||` and a random orthogonal
/// direction; the radius is then updated along the new ray with a stepping-out
/// window clamped at zero. Both updates shrink towards the current value with
/// the coarse check first.
pub fn step_da_gpss<R: RngCore + ?Sized>(
    target: &FactorizedTarget,
    state: &ChainState,
    config: &SamplerConfig,
    rng: &mut R,
    ledger: &mut EvalLedger,
) -> Result<ChainState> {
    if !matches!(target.reference(), ReferenceMeasure::PolarLebesgue { .. }) {
        return Err(Error::InvalidReference(format!(
            "polar slice sampling needs the polar reference, got {}",
            target.reference().name()
        )));
    }
    let r0 = norm(&state.x);
    if r0 == 0.0 {
        return Err(Error::InvalidArgument(
            "polar slice sampling cannot start at the origin".into(),
        ));
    }
    let v0 = scaled(&state.x, 1.0 / r0);

    let levels = Levels::draw(state.log_coarse, state.log_fine, rng);
    let v_perp = sample_orth_sphere(&v0, rng)?;
    let theta = TAU * uniform(rng);
    let u = uniform(rng);
    let ledger = RefCell::new(ledger);

    // direction update on the great circle at radius r0
    let on_circle =
        |th: f64| -> Result<Vec<f64>> { Ok(scaled(&ellipse_point(&v0, &v_perp, th)?, r0)) };
    let theta = da_shrink(
        |th| {
            target.in_superlevel(
                Factor::Coarse,
                &on_circle(th)?,
                levels.log_s,
                &mut ledger.borrow_mut(),
            )
        },
        |th| {
            target.in_superlevel(
                Factor::Fine,
                &on_circle(th)?,
                levels.log_t,
                &mut ledger.borrow_mut(),
            )
        },
        Bracket {
            l: theta - TAU,
            r: theta,
            anchor: 0.0,
        },
        theta,
        rng,
        config.max_shrink,
    )?;
    let v = ellipse_point(&v0, &v_perp, theta)?;

    // radius update along the ray through v
    let bracket = step_out_at(
        |r| {
            target.in_superlevel(
                Factor::Coarse,
                &scaled(&v, r),
                levels.log_s,
                &mut ledger.borrow_mut(),
            )
        },
        r0,
        config.w,
        Some(0.0),
        u,
        config.max_expand,
    )?;
    let r_start = uniform_in(rng, bracket.l, bracket.r);
    let mut coarse_at = f64::NAN;
    let mut fine_at = f64::NAN;
    let r = da_shrink(
        |r| {
            let c = target.check(
                Factor::Coarse,
                &scaled(&v, r),
                levels.log_s,
                &mut ledger.borrow_mut(),
            )?;
            coarse_at = c.log_value;
            Ok(c.passed)
        },
        |r| {
            let f = target.check(
                Factor::Fine,
                &scaled(&v, r),
                levels.log_t,
                &mut ledger.borrow_mut(),
            )?;
            fine_at = f.log_value;
            Ok(f.passed)
        },
        bracket,
        r_start,
        rng,
        config.max_shrink,
    )?;
    Ok(ChainState {
        x: scaled(&v, r),
        log_coarse: coarse_at,
        log_fine: fine_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::check_ordering;
    use crate::models::example1d::{product_target, ReferenceKind};
    use crate::rng::{stream_rng, Stream};

    #[test]
    fn cached_values_match_and_ordering_holds() {
        for dim in [2, 3, 5] {
            let target = product_target(dim, ReferenceKind::Polar).unwrap();
            let mut ledger = EvalLedger::with_trace();
            let mut state = ChainState::new(&target, vec![0.5; dim], &mut ledger).unwrap();
            let mut rng = stream_rng(dim as u64, Stream::Chain);
            let cfg = SamplerConfig::default();
            for _ in 0..500 {
                ledger.begin_transition(&state.x);
                state = step_da_gpss(&target, &state, &cfg, &mut rng, &mut ledger).unwrap();
                assert_eq!(state.log_coarse, target.coarse().log_value(&state.x));
                assert_eq!(state.log_fine, target.fine_ratio().log_value(&state.x));
                assert!(norm(&state.x) > 0.0);
            }
            assert!(check_ordering(ledger.trace()).is_empty());
        }
    }

    #[test]
    fn rejects_origin_and_other_references() {
        let target = product_target(2, ReferenceKind::Polar).unwrap();
        let mut ledger = EvalLedger::new();
        let state = ChainState {
            x: vec![0.0, 0.0],
            log_coarse: 0.0,
            log_fine: 0.0,
        };
        let mut rng = stream_rng(1, Stream::Chain);
        let cfg = SamplerConfig::default();
        assert!(step_da_gpss(&target, &state, &cfg, &mut rng, &mut ledger).is_err());

        let leb = product_target(2, ReferenceKind::Lebesgue).unwrap();
        let state = ChainState::new(&leb, vec![0.1, 0.2], &mut ledger).unwrap();
        assert!(matches!(
            step_da_gpss(&leb, &state, &cfg, &mut rng, &mut ledger),
            Err(Error::InvalidReference(_))
        ));
    }

    #[test]
    fn radius_stays_positive_and_moves() {
        let target = product_target(2, ReferenceKind::Polar).unwrap();
        let mut ledger = EvalLedger::new();
        let mut state = ChainState::new(&target, vec![0.01, 0.01], &mut ledger).unwrap();
        let mut rng = stream_rng(9, Stream::Chain);
        let mut radii = Vec::new();
        for _ in 0..2000 {
            state = step_da_gpss(
                &target,
                &state,
                &SamplerConfig::default(),
                &mut rng,
                &mut ledger,
            )
            .unwrap();
            radii.push(norm(&state.x));
        }
        let mean = radii.iter().sum::<f64>() / radii.len() as f64;
        // each coordinate has |x| around 1, so the radius should be O(1)
        assert!(mean > 0.8 && mean < 3.0, "{mean}");
    }
}
