#![allow(dead_code)]

pub mod plain;

use daslice::models::example1d::{self, TrueCdf};
use daslice::rng::{indexed_rng, uniform, Stream};
use daslice::samplers::{AcceptStats, ChainState, Kernel, SampleMatrix, SamplerConfig};
use daslice::{DensityFactor, EvalLedger, FactorizedTarget};
use rand::RngCore;

/// The same density with everything moved into the cheap factor.
pub fn collapse(target: &FactorizedTarget) -> FactorizedTarget {
    let coarse = target.coarse().clone();
    let fine = target.fine_ratio().clone();
    let full = DensityFactor::new(target.dim(), move |x| {
        coarse.log_value(x) + fine.log_value(x)
    });
    let t = FactorizedTarget::trivial_factorization(full, target.reference().clone()).unwrap();
    match target.direct_sampler() {
        Some(_) if target.dim() == 1 => {
            let d = example1d::plain_target();
            t.with_direct_sampler(move |log_s, rng| d.direct_sampler().unwrap()(log_s, rng))
        }
        _ => t,
    }
}

pub fn oracle() -> TrueCdf {
    example1d::example1d_true_cdf(200_001).unwrap()
}

/// `n` i.i.d. draws from the one-dimensional target by inverse CDF, `dim`
/// coordinates per row.
pub fn iid_rows(cdf: &TrueCdf, n: usize, dim: usize, seed: u64) -> SampleMatrix {
    let mut rng = indexed_rng(seed, Stream::Data, 99);
    let mut m = SampleMatrix::with_capacity(dim, n);
    for _ in 0..n {
        let row: Vec<f64> = (0..dim).map(|_| cdf.quantile(uniform(&mut rng))).collect();
        m.push(&row);
    }
    m
}

/// Advances one transition of a DA kernel.
pub fn da_step(
    kernel: Kernel,
    target: &FactorizedTarget,
    state: &ChainState,
    cfg: &SamplerConfig,
    rng: &mut dyn RngCore,
    ledger: &mut EvalLedger,
) -> ChainState {
    let mut rng = rng;
    kernel
        .step(
            target,
            state,
            cfg,
            &mut rng,
            ledger,
            &mut AcceptStats::default(),
        )
        .unwrap()
}
