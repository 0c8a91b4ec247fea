//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the whole suite reports even when a criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use common::{collapse, oracle, plain};
use daslice::batch::{map_indexed, push_forward, Execution};
use daslice::diagnostics::{
    asymptotic_variance, ess, ks_distance, relative_efficiency, CostMode, ScalarSeries,
};
use daslice::ledger::check_ordering;
use daslice::models::bip::{self, bip_forward, bip_prior};
use daslice::models::example1d::{self, product_target, ReferenceKind, TrueCdf};
use daslice::rng::{indexed_rng, standard_normal, stream_rng, ScriptedRng, Stream};
use daslice::samplers::{
    run_chain, tune_mh_step, ChainState, Kernel, SamplerConfig, TuningOptions,
};
use daslice::{EvalLedger, FactorizedTarget, ReferenceMeasure};
use daslice_cli::{
    execute, ExperimentConfig, ModelConfig, SamplerKind, SamplerSettings, CHAIN_FILE, SUMMARY_FILE,
};
use rand::RngCore;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Target and starting point used for each kernel on the example density.
fn example_target(kernel: Kernel) -> (FactorizedTarget, Vec<f64>) {
    match kernel {
        Kernel::DaMh | Kernel::DaIdeal => (example1d::target(), vec![0.5]),
        Kernel::DaEss => (
            product_target(2, ReferenceKind::Gaussian { variance: 4.0 }).unwrap(),
            vec![0.5, 0.5],
        ),
        Kernel::DaHruss => (
            product_target(2, ReferenceKind::Lebesgue).unwrap(),
            vec![0.5, 0.5],
        ),
        Kernel::DaGpss => (
            product_target(2, ReferenceKind::Polar).unwrap(),
            vec![0.5, 0.5],
        ),
    }
}

fn tuned_mh_step(seed: u64) -> f64 {
    let cfg = SamplerConfig::default();
    let t = tune_mh_step(
        &example1d::target(),
        &[0.5],
        &cfg,
        seed,
        &TuningOptions::default(),
    )
    .unwrap();
    assert!(t.within_band, "random-walk tuning missed the band: {t:?}");
    t.step
}

fn asym_var(values: Vec<f64>) -> f64 {
    asymptotic_variance(&ScalarSeries::new(values).unwrap()).unwrap()
}

fn variance_comparison() -> Outcome {
    let target = example1d::target();
    let seeds: Vec<u64> = (1..=10).collect();
    let rows = map_indexed(Execution::default(), seeds.len(), |i| {
        let seed = seeds[i];
        let step = tuned_mh_step(seed);
        let cfg = SamplerConfig {
            mh_step: step,
            ..Default::default()
        };
        let ss = run_chain(
            Kernel::DaIdeal,
            &target,
            &[0.5],
            1_000_000,
            100_000,
            seed,
            &cfg,
        )
        .unwrap();
        let mh = run_chain(
            Kernel::DaMh,
            &target,
            &[0.5],
            1_000_000,
            100_000,
            seed,
            &cfg,
        )
        .unwrap();
        let rate = mh.accept_stats.unwrap().overall_rate();
        (
            asym_var(ss.samples.column(0)),
            asym_var(mh.samples.column(0)),
            rate,
        )
    });
    let mut ok = true;
    let mut ordered = 0;
    for &(ss, mh, rate) in &rows {
        ok &= (1.6..=3.2).contains(&ss)
            && (18.0..=48.0).contains(&mh)
            && (0.25..=0.35).contains(&rate);
        ordered += usize::from(ss < mh);
    }
    let mean = |f: fn(&(f64, f64, f64)) -> f64| rows.iter().map(f).sum::<f64>() / rows.len() as f64;
    let range = |f: fn(&(f64, f64, f64)) -> f64| {
        let v: Vec<f64> = rows.iter().map(f).collect();
        (
            v.iter().cloned().fold(f64::INFINITY, f64::min),
            v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        )
    };
    let (ss_lo, ss_hi) = range(|r| r.0);
    let (mh_lo, mh_hi) = range(|r| r.1);
    let (a_lo, a_hi) = range(|r| r.2);
    check(
        ok && ordered == 10,
        format!(
            "slice V {:.3} [{ss_lo:.3}, {ss_hi:.3}], MH V {:.2} [{mh_lo:.2}, {mh_hi:.2}], MH acceptance [{a_lo:.3}, {a_hi:.3}], ordered in {ordered}/10 seeds",
            mean(|r| r.0),
            mean(|r| r.1)
        ),
    )
}

fn ks_to(cdf: &TrueCdf, values: &[f64]) -> f64 {
    ks_distance(values, |x| cdf.cdf(x)).unwrap()
}

fn chain_exactness(cdf: &TrueCdf) -> Outcome {
    let step = tuned_mh_step(7);
    let results = map_indexed(Execution::default(), Kernel::ALL.len(), |k| {
        let kernel = Kernel::ALL[k];
        let (target, x0) = example_target(kernel);
        let cfg = SamplerConfig {
            mh_step: step,
            ..Default::default()
        };
        let res = run_chain(kernel, &target, &x0, 200_000, 10_000, 2024, &cfg).unwrap();
        (kernel, ks_to(cdf, &res.samples.column(0)))
    });
    let ok = results.iter().all(|&(_, d)| d < 0.02);
    let detail = results
        .iter()
        .map(|(k, d)| format!("{k} {d:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    check(ok, format!("KS {detail}"))
}

/// Largest gap between the empirical CDFs of two samples.
fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    let mut sorted = b.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    ks_distance(a, |x| sorted.partition_point(|&v| v <= x) as f64 / n).unwrap()
}

fn one_step_invariance(cdf: &TrueCdf) -> Outcome {
    let step = tuned_mh_step(7);
    let cfg = SamplerConfig {
        mh_step: step,
        ..Default::default()
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, kernel) in Kernel::ALL.into_iter().enumerate() {
        let (target, _) = example_target(kernel);
        let starts = common::iid_rows(cdf, 100_000, target.dim(), 31 + k as u64);
        let (pushed, _) =
            push_forward(Execution::default(), kernel, &target, &starts, 77, &cfg).unwrap();
        let before = starts.column(0);
        let after = pushed.column(0);
        let to_oracle = ks_to(cdf, &after);
        let moved = two_sample_ks(&after, &before);
        ok &= to_oracle < 0.01 && moved < 0.01;
        parts.push(format!("{kernel} {to_oracle:.4}/{moved:.4}"));
    }
    check(ok, format!("KS to oracle/to start: {}", parts.join(", ")))
}

fn script(seed: u64) -> ScriptedRng {
    let mut src = stream_rng(seed, Stream::Chain);
    ScriptedRng::from_words((0..200_000).map(|_| src.next_u64()))
}

/// Number of transitions on which the delayed kernel and the plain kernel
/// agree bit for bit, draws consumed included.
fn matching_transitions(
    kernel: Kernel,
    target: &FactorizedTarget,
    x0: Vec<f64>,
    cfg: &SamplerConfig,
    plain_step: plain::PlainStep,
) -> usize {
    let mut rng_da = script(kernel as u64 + 1);
    let mut rng_plain = script(kernel as u64 + 1);
    let mut ledger = EvalLedger::new();
    let mut state = ChainState::new(target, x0.clone(), &mut ledger).unwrap();
    let mut x = x0;
    for i in 0..1000 {
        state = common::da_step(kernel, target, &state, cfg, &mut rng_da, &mut ledger);
        x = plain_step(&x, &mut rng_plain);
        if state.x != x || rng_da.remaining() != rng_plain.remaining() {
            return i;
        }
    }
    1000
}

fn reduction_identity() -> Outcome {
    let lp1 = |x: &[f64]| example1d::log_density(x[0]);
    let one_d = example1d::plain_target();
    let direct = example1d::plain_target();
    let d = direct.direct_sampler().unwrap();
    let mut counts = Vec::new();

    let cfg = SamplerConfig {
        mh_step: 2.5,
        ..Default::default()
    };
    counts.push((
        "DA-MH",
        matching_transitions(Kernel::DaMh, &one_d, vec![0.3], &cfg, &|x, r| {
            plain::mh(&lp1, x, 2.5, r)
        }),
    ));
    let cfg = SamplerConfig::default();
    counts.push((
        "DA-ideal",
        matching_transitions(Kernel::DaIdeal, &one_d, vec![0.3], &cfg, &|x, r| {
            plain::ideal(&lp1, x, d, r)
        }),
    ));

    let ess = collapse(&product_target(2, ReferenceKind::Gaussian { variance: 4.0 }).unwrap());
    let ReferenceMeasure::Gaussian(prior) = ess.reference().clone() else {
        unreachable!()
    };
    let lp = |x: &[f64]| ess.coarse().log_value(x);
    counts.push((
        "DA-ESS",
        matching_transitions(Kernel::DaEss, &ess, vec![0.3, -0.2], &cfg, &|x, r| {
            plain::ess(&lp, x, &prior, r)
        }),
    ));

    let hr = collapse(&product_target(2, ReferenceKind::Lebesgue).unwrap());
    let lp = |x: &[f64]| hr.coarse().log_value(x);
    let cfg = SamplerConfig {
        w: 0.7,
        ..Default::default()
    };
    counts.push((
        "DA-HRUSS",
        matching_transitions(Kernel::DaHruss, &hr, vec![0.3, -0.2], &cfg, &|x, r| {
            plain::hruss(&lp, x, 0.7, r)
        }),
    ));

    let gp = collapse(&product_target(3, ReferenceKind::Polar).unwrap());
    let lp = |x: &[f64]| gp.coarse().log_value(x);
    let cfg = SamplerConfig {
        w: 0.5,
        ..Default::default()
    };
    counts.push((
        "DA-GPSS",
        matching_transitions(Kernel::DaGpss, &gp, vec![0.4; 3], &cfg, &|x, r| {
            plain::gpss(&lp, x, 0.5, r)
        }),
    ));

    let ok = counts.iter().all(|&(_, c)| c == 1000);
    let detail = counts
        .iter()
        .map(|(k, c)| format!("{k} {c}/1000"))
        .collect::<Vec<_>>()
        .join(", ");
    check(ok, format!("identical transitions: {detail}"))
}

fn ordering() -> Outcome {
    let step = tuned_mh_step(7);
    let cfg = SamplerConfig {
        mh_step: step,
        ..Default::default()
    };
    let results = map_indexed(Execution::default(), Kernel::ALL.len(), |k| {
        let kernel = Kernel::ALL[k];
        let (target, x0) = example_target(kernel);
        let mut ledger = EvalLedger::with_trace();
        let mut state = ChainState::new(&target, x0, &mut ledger).unwrap();
        let mut rng = stream_rng(500 + k as u64, Stream::Chain);
        let mut violations = 0;
        for _ in 0..100_000 {
            state = common::da_step(kernel, &target, &state, &cfg, &mut rng, &mut ledger);
            if ledger.trace().len() > 100_000 {
                violations += check_ordering(&ledger.take_trace()).len();
            }
        }
        violations += check_ordering(ledger.trace()).len();
        (kernel, violations, ledger.n_fine())
    });
    let ok = results.iter().all(|&(_, v, _)| v == 0);
    let detail = results
        .iter()
        .map(|(k, v, f)| format!("{k} {v} violations in {f} fine evals"))
        .collect::<Vec<_>>()
        .join(", ");
    check(ok, detail)
}

fn bip_config(data: &Path, sampler: SamplerKind, h: Option<f64>) -> ExperimentConfig {
    ExperimentConfig {
        model: ModelConfig::Bip {
            data: data.to_path_buf(),
            dim: 10,
            sigma2: 0.01,
            h_ref: 1.0 / 512.0,
        },
        sampler,
        h,
        h_grid: None,
        n: 100_000,
        burn_in: 10_000,
        seed: 5,
        sampler_config: SamplerSettings::default(),
        out: data.parent().unwrap().to_path_buf(),
        cost_mode: CostMode::WeightedEvals,
        thin: 1,
        x0: None,
        baseline: None,
    }
}

fn cost_reduction() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let data = bip::bip_generate_data(5, 10, 0.01, 1.0 / 512.0).unwrap();
    let path = dir.path().join("bip_data.json");
    fs::write(&path, serde_json::to_string(&data).unwrap()).unwrap();
    let jobs = [
        (SamplerKind::Ess, None),
        (SamplerKind::DaEss, Some(1.0 / 64.0)),
    ];
    let runs = map_indexed(Execution::default(), 2, |i| {
        execute(
            &bip_config(&path, jobs[i].0, jobs[i].1),
            jobs[i].0,
            jobs[i].1,
        )
        .unwrap()
        .summary
    });
    let (plain, da) = (&runs[0], &runs[1]);
    let ratio = da.expensive_evals_per_iter / plain.expensive_evals_per_iter;
    let re = relative_efficiency(&da.report, &plain.report, CostMode::WeightedEvals).unwrap();
    check(
        ratio <= 0.6 && re > 1.0,
        format!(
            "fine evals per iteration {:.3} vs {:.3} (ratio {ratio:.3}), weighted relative efficiency {re:.3}",
            da.expensive_evals_per_iter, plain.expensive_evals_per_iter
        ),
    )
}

fn forward_map() -> Outcome {
    let mut worst = 0.0f64;
    for k in 2..=16 {
        let h = 0.5f64.powi(k);
        let f = bip_forward(&[0.0; 10], h).unwrap();
        for (a, b) in f.iter().zip([0.5, 1.0, 1.5]) {
            worst = worst.max((a - b).abs());
        }
    }
    let prior = bip_prior(10).unwrap();
    let mut rng = stream_rng(3, Stream::Data);
    let dist = |a: [f64; 3], b: [f64; 3]| {
        a.iter()
            .zip(&b)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let ratios: Vec<f64> = (0..20)
        .map(|_| {
            let x = prior.sample(&mut rng);
            let f = bip_forward(&x, 1.0 / 16.0).unwrap();
            let f2 = bip_forward(&x, 1.0 / 32.0).unwrap();
            let f4 = bip_forward(&x, 1.0 / 64.0).unwrap();
            dist(f, f2) / dist(f2, f4)
        })
        .collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    check(
        worst <= 1e-12 && (3.5..=4.5).contains(&lo) && (3.5..=4.5).contains(&hi),
        format!(
            "max |F_h(0) - (0.5, 1, 1.5)| {worst:.1e}, convergence ratios in [{lo:.4}, {hi:.4}]"
        ),
    )
}

fn estimator_sanity() -> Outcome {
    let n = 100_000;
    let mut rng = indexed_rng(8, Stream::Data, 0);
    let iid: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
    let mut ar = Vec::with_capacity(n);
    let mut prev = standard_normal(&mut rng) / (1.0f64 - 0.25).sqrt();
    for _ in 0..n {
        prev = 0.5 * prev + standard_normal(&mut rng);
        ar.push(prev);
    }
    let r_iid = ess(&ScalarSeries::new(iid).unwrap()).unwrap() / n as f64;
    let r_ar = ess(&ScalarSeries::new(ar).unwrap()).unwrap() / n as f64;
    check(
        (0.9..=1.1).contains(&r_iid) && (0.30..=0.37).contains(&r_ar),
        format!("n_eff/n iid {r_iid:.4}, AR(1) {r_ar:.4}"),
    )
}

fn reproducibility() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let root = dir.path();
    let daslice = |args: &[&str]| {
        let o = Command::new(env!("CARGO_BIN_EXE_daslice"))
            .args(args)
            .output()
            .unwrap();
        assert!(
            o.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    };
    let configs = [
        (
            "example",
            r#"{"model": {"kind": "example1d"}, "sampler": "da_mh", "n": 20000, "burn_in": 1000, "seed": 4}"#,
        ),
        (
            "gpss",
            r#"{"model": {"kind": "example1d", "dim": 3}, "sampler": "da_gpss", "n": 20000, "seed": 4, "thin": 3}"#,
        ),
        (
            "bip",
            r#"{"model": {"kind": "bip", "data": "bip_data.json"}, "sampler": "da_ess", "h": 0.015625, "n": 5000, "seed": 4}"#,
        ),
        (
            "logreg",
            r#"{"model": {"kind": "logreg", "data": "logreg_data.csv", "m": 500}, "sampler": "da_hruss", "h": 0.5, "n": 3000, "seed": 4}"#,
        ),
    ];
    let mut identical = 0;
    for (name, json) in configs {
        let cfg = root.join(format!("{name}.json"));
        fs::write(&cfg, json).unwrap();
        let c = cfg.to_str().unwrap();
        let r = root.to_str().unwrap();
        if name == "bip" || name == "logreg" {
            daslice(&["generate-data", "--config", c, "--out", r]);
        }
        let out = root.join(name);
        fs::create_dir(&out).unwrap();
        let o = out.to_str().unwrap();
        let mut seen = Vec::new();
        for _ in 0..2 {
            daslice(&["run", "--config", c, "--out", o]);
            seen.push((
                fs::read(out.join(CHAIN_FILE)).unwrap(),
                fs::read(out.join(SUMMARY_FILE)).unwrap(),
            ));
        }
        identical += usize::from(seen[0] == seen[1]);
    }
    check(
        identical == configs.len(),
        format!(
            "{identical}/{} configs byte-identical on rerun",
            configs.len()
        ),
    )
}

fn main() -> ExitCode {
    let cdf = oracle();
    let criteria: Vec<(usize, Box<dyn Fn() -> Outcome>)> = vec![
        (1, Box::new(variance_comparison)),
        (2, Box::new(|| chain_exactness(&cdf))),
        (3, Box::new(|| one_step_invariance(&cdf))),
        (4, Box::new(reduction_identity)),
        (5, Box::new(ordering)),
        (6, Box::new(cost_reduction)),
        (7, Box::new(forward_map)),
        (8, Box::new(estimator_sanity)),
        (9, Box::new(reproducibility)),
    ];
    let mut failed = 0;
    for (id, run) in &criteria {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {id}: PASS ({secs:.1}s) {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {id}: FAIL ({secs:.1}s) {d}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
