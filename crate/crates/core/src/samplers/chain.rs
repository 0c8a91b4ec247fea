use std::time::Instant;

use super::{AcceptStats, ChainState, Kernel, SamplerConfig};
use crate::ledger::{EvalCounts, EvalLedger};
use crate::rng::{stream_rng, Stream};
use crate::target::FactorizedTarget;
use crate::{Error, Result};

/// Row-major `n x dim` matrix of chain states.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SampleMatrix {
    pub fn with_capacity(dim: usize, rows: usize) -> Self {
        Self {
            dim,
            data: Vec::with_capacity(dim * rows),
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        assert_eq!(
            row.len(),
            self.dim,
            "row length must match the matrix width"
        );
        self.data.extend_from_slice(row);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_rows(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Output of one chain run.
#[derive(Debug, Clone)]
pub struct ChainResult {
    pub kernel: Kernel,
    /// The last `n` states.
    pub samples: SampleMatrix,
    /// Counts over the whole run, burn-in included.
    pub ledger: EvalCounts,
    /// Counts at the end of burn-in (initial evaluation included).
    pub burn_in_ledger: EvalCounts,
    pub wall_seconds: f64,
    pub n: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Stage acceptance counts over the kept iterations (DA-MH only).
    pub accept_stats: Option<AcceptStats>,
    pub final_state: ChainState,
}

impl ChainResult {
    /// Counts accumulated after burn-in.
    pub fn sampling_counts(&self) -> EvalCounts {
        self.ledger.since(self.burn_in_ledger)
    }

    /// Equality of everything except wall time.
    pub fn same_draws(&self, other: &ChainResult) -> bool {
        self.kernel == other.kernel
            && self.samples == other.samples
            && self.ledger == other.ledger
            && self.burn_in_ledger == other.burn_in_ledger
            && self.n == other.n
            && self.burn_in == other.burn_in
            && self.seed == other.seed
            && self.accept_stats == other.accept_stats
            && self.final_state == other.final_state
    }
}

/// Runs `burn_in + n` transitions from `x0` and keeps the last `n` states.
///
/// Burn-in and kept iterations draw from separate named sub-streams of
/// `seed`, so the same seed reproduces the result bit for bit.
pub fn run_chain(
    kernel: Kernel,
    target: &FactorizedTarget,
    x0: &[f64],
    n: usize,
    burn_in: usize,
    seed: u64,
    config: &SamplerConfig,
) -> Result<ChainResult> {
    config.validate()?;
    let started = Instant::now();
    let wrap = |iteration: usize| {
        move |e: Error| Error::Chain {
            kernel: kernel.name(),
            iteration,
            source: Box::new(e),
        }
    };

    let mut ledger = EvalLedger::new();
    let mut state = ChainState::new(target, x0.to_vec(), &mut ledger).map_err(wrap(0))?;
    let mut accept = AcceptStats::default();

    let mut rng = stream_rng(seed, Stream::BurnIn);
    for i in 0..burn_in {
        state = kernel
            .step(target, &state, config, &mut rng, &mut ledger, &mut accept)
            .map_err(wrap(i))?;
    }
    let burn_in_ledger = ledger.counts();

    let mut accept = AcceptStats::default();
    let mut samples = SampleMatrix::with_capacity(target.dim(), n);
    let mut rng = stream_rng(seed, Stream::Chain);
    for i in 0..n {
        state = kernel
            .step(target, &state, config, &mut rng, &mut ledger, &mut accept)
            .map_err(wrap(burn_in + i))?;
        samples.push(&state.x);
    }

    Ok(ChainResult {
        kernel,
        samples,
        ledger: ledger.counts(),
        burn_in_ledger,
        wall_seconds: started.elapsed().as_secs_f64(),
        n,
        burn_in,
        seed,
        accept_stats: (kernel == Kernel::DaMh).then_some(accept),
        final_state: state,
    })
}
