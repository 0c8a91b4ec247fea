//! Data-parallel drivers: independent chains over a list of seeds, and one
//! transition applied to many start points.
//!
//! Every unit of work owns its random stream, so the results do not depend on
//! the execution mode or the thread count.

use crate::ledger::{EvalCounts, EvalLedger};
use crate::rng::{indexed_rng, Stream};
use crate::samplers::{
    run_chain, AcceptStats, ChainResult, ChainState, Kernel, SampleMatrix, SamplerConfig,
};
use crate::target::FactorizedTarget;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses the rayon thread pool when the `parallel` feature is enabled,
    /// and runs sequentially otherwise.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// `(0..n).map(f)` in the requested execution mode, order preserved.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Like [`map_indexed`] but stops at the first error (by index).
pub fn try_map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    map_indexed(exec, n, f).into_iter().collect()
}

/// One chain per seed.
#[allow(clippy::too_many_arguments)]
pub fn run_chains(
    exec: Execution,
    kernel: Kernel,
    target: &FactorizedTarget,
    x0: &[f64],
    n: usize,
    burn_in: usize,
    seeds: &[u64],
    config: &SamplerConfig,
) -> Result<Vec<ChainResult>> {
    try_map_indexed(exec, seeds.len(), |i| {
        run_chain(kernel, target, x0, n, burn_in, seeds[i], config)
    })
}

/// Applies one transition to every row of `starts`. Row `i` uses sub-stream
/// `i` of `seed`. Returns the moved points and the total evaluation counts,
/// including the evaluations at the start points.
pub fn push_forward(
    exec: Execution,
    kernel: Kernel,
    target: &FactorizedTarget,
    starts: &SampleMatrix,
    seed: u64,
    config: &SamplerConfig,
) -> Result<(SampleMatrix, EvalCounts)> {
    config.validate()?;
    let moved = try_map_indexed(exec, starts.n_rows(), |i| {
        let mut rng = indexed_rng(seed, Stream::Batch, i as u64);
        let mut ledger = EvalLedger::new();
        let state = ChainState::new(target, starts.row(i).to_vec(), &mut ledger)?;
        let next = kernel.step(
            target,
            &state,
            config,
            &mut rng,
            &mut ledger,
            &mut AcceptStats::default(),
        )?;
        Ok((next.x, ledger.counts()))
    })?;
    let mut out = SampleMatrix::with_capacity(starts.dim(), moved.len());
    let mut total = EvalCounts::default();
    for (x, c) in &moved {
        out.push(x);
        total.coarse += c.coarse;
        total.fine += c.fine;
    }
    Ok((out, total))
}
