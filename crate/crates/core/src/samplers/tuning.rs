use serde::{Deserialize, Serialize};

use super::{AcceptStats, ChainState, Kernel, SamplerConfig};
use crate::ledger::EvalLedger;
use crate::rng::{indexed_rng, Stream};
use crate::target::FactorizedTarget;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningOptions {
    pub target_rate: f64,
    pub band: (f64, f64),
    pub pilot_len: usize,
    pub max_rounds: usize,
}

impl Default for TuningOptions {
    fn default() -> Self {
        Self {
            target_rate: 0.30,
            band: (0.25, 0.35),
            pilot_len: 20_000,
            max_rounds: 40,
        }
    }
}

/// Outcome of the DA-MH step-size sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MhTuning {
    pub step: f64,
    pub acceptance: f64,
    pub within_band: bool,
    pub pilots: usize,
}

/// Picks the DA-MH random-walk scale whose overall acceptance is closest to
/// `target_rate`.
///
/// Doubles or halves the step from `config.mh_step` until the pilot
/// acceptance crosses the target, then bisects in log scale. Each pilot
/// restarts at `x0` on its own tuning sub-stream.
pub fn tune_mh_step(
    target: &FactorizedTarget,
    x0: &[f64],
    config: &SamplerConfig,
    seed: u64,
    options: &TuningOptions,
) -> Result<MhTuning> {
    config.validate()?;
    let mut pilots = 0usize;
    let mut pilot = |step: f64| -> Result<f64> {
        let cfg = SamplerConfig {
            mh_step: step,
            ..*config
        };
        let mut rng = indexed_rng(seed, Stream::Tuning, pilots as u64);
        pilots += 1;
        let mut ledger = EvalLedger::new();
        let mut state = ChainState::new(target, x0.to_vec(), &mut ledger)?;
        let mut warm = AcceptStats::default();
        for _ in 0..options.pilot_len / 10 {
            state = Kernel::DaMh.step(target, &state, &cfg, &mut rng, &mut ledger, &mut warm)?;
        }
        let mut stats = AcceptStats::default();
        for _ in 0..options.pilot_len {
            state = Kernel::DaMh.step(target, &state, &cfg, &mut rng, &mut ledger, &mut stats)?;
        }
        Ok(stats.overall_rate())
    };

    let goal = options.target_rate;
    let mut best = (config.mh_step, pilot(config.mh_step)?);
    let closer = |best: &mut (f64, f64), cand: (f64, f64)| {
        if (cand.1 - goal).abs() < (best.1 - goal).abs() {
            *best = cand;
        }
    };

    // bracket the target rate: acceptance decreases with the step size
    let (mut lo, mut hi);
    let mut step = best.0;
    let mut rounds = 0;
    if best.1 > goal {
        loop {
            let next = step * 2.0;
            let a = pilot(next)?;
            closer(&mut best, (next, a));
            rounds += 1;
            if a <= goal || rounds >= options.max_rounds {
                lo = step;
                hi = next;
                break;
            }
            step = next;
        }
    } else {
        loop {
            let next = step / 2.0;
            let a = pilot(next)?;
            closer(&mut best, (next, a));
            rounds += 1;
            if a >= goal || rounds >= options.max_rounds {
                lo = next;
                hi = step;
                break;
            }
            step = next;
        }
    }

    while rounds < options.max_rounds && hi / lo > 1.02 {
        let mid = (lo * hi).sqrt();
        let a = pilot(mid)?;
        closer(&mut best, (mid, a));
        rounds += 1;
        if (a - goal).abs() < 0.005 {
            break;
        }
        if a > goal {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    Ok(MhTuning {
        step: best.0,
        acceptance: best.1,
        within_band: options.band.0 <= best.1 && best.1 <= options.band.1,
        pilots,
    })
}
