//! Experiment driver behind the `daslice` binary: configuration, data
//! generation, single runs, h-sweeps and efficiency comparisons.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use daslice::batch::{map_indexed, Execution};
use daslice::diagnostics::{relative_efficiency, CostMode, DiagnosticsReport, ScalarSeries};
use daslice::models::bip::{self, BipData, BipModel};
use daslice::models::example1d::{self, ReferenceKind};
use daslice::models::logreg::{self, LogRegModel};
use daslice::models::PriorReference;
use daslice::samplers::{
    run_chain, tune_mh_step, AcceptStats, ChainResult, Kernel, MhTuning, SamplerConfig,
    TuningOptions,
};
use daslice::{EvalCounts, FactorizedTarget};

pub const CHAIN_FILE: &str = "chain.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const PLOT_FILE: &str = "plot_data.csv";
pub const BIP_DATA_FILE: &str = "bip_data.json";
pub const LOGREG_DATA_FILE: &str = "logreg_data.csv";

/// Which sampler a run uses. Plain samplers are the delayed-acceptance
/// kernels run on the trivial factorization of the reference-fidelity target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Mh,
    DaMh,
    Ideal,
    DaIdeal,
    Ess,
    DaEss,
    Hruss,
    DaHruss,
    Gpss,
    DaGpss,
}

impl SamplerKind {
    pub fn kernel(self) -> Kernel {
        match self {
            SamplerKind::Mh | SamplerKind::DaMh => Kernel::DaMh,
            SamplerKind::Ideal | SamplerKind::DaIdeal => Kernel::DaIdeal,
            SamplerKind::Ess | SamplerKind::DaEss => Kernel::DaEss,
            SamplerKind::Hruss | SamplerKind::DaHruss => Kernel::DaHruss,
            SamplerKind::Gpss | SamplerKind::DaGpss => Kernel::DaGpss,
        }
    }

    pub fn is_plain(self) -> bool {
        matches!(
            self,
            SamplerKind::Mh
                | SamplerKind::Ideal
                | SamplerKind::Ess
                | SamplerKind::Hruss
                | SamplerKind::Gpss
        )
    }

    pub fn plain(self) -> SamplerKind {
        match self.kernel() {
            Kernel::DaMh => SamplerKind::Mh,
            Kernel::DaIdeal => SamplerKind::Ideal,
            Kernel::DaEss => SamplerKind::Ess,
            Kernel::DaHruss => SamplerKind::Hruss,
            Kernel::DaGpss => SamplerKind::Gpss,
        }
    }

    pub fn delayed(self) -> SamplerKind {
        match self.kernel() {
            Kernel::DaMh => SamplerKind::DaMh,
            Kernel::DaIdeal => SamplerKind::DaIdeal,
            Kernel::DaEss => SamplerKind::DaEss,
            Kernel::DaHruss => SamplerKind::DaHruss,
            Kernel::DaGpss => SamplerKind::DaGpss,
        }
    }

    fn prior_reference(self) -> PriorReference {
        match self.kernel() {
            Kernel::DaEss => PriorReference::Gaussian,
            Kernel::DaGpss => PriorReference::Polar,
            _ => PriorReference::Lebesgue,
        }
    }
}

fn default_dim_bip() -> usize {
    bip::DEFAULT_DIM
}
fn default_sigma2() -> f64 {
    bip::DEFAULT_SIGMA2
}
fn default_h_ref() -> f64 {
    bip::DEFAULT_H_REF
}
fn default_m() -> usize {
    5000
}
fn one() -> usize {
    1
}
fn default_out() -> PathBuf {
    PathBuf::from(".")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    /// `exp(|x| - x^2/2)` per coordinate; quantity of interest `x1`.
    Example1d {
        #[serde(default = "one")]
        dim: usize,
    },
    /// Inverse problem; `dim`, `sigma2` and `h_ref` are used when generating
    /// data, runs take them from the data file.
    Bip {
        data: PathBuf,
        #[serde(default = "default_dim_bip")]
        dim: usize,
        #[serde(default = "default_sigma2")]
        sigma2: f64,
        #[serde(default = "default_h_ref")]
        h_ref: f64,
    },
    /// Logistic regression on a CSV file; `m` and `x_true` drive synthetic
    /// data generation.
    Logreg {
        data: PathBuf,
        #[serde(default = "default_m")]
        m: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x_true: Option<Vec<f64>>,
    },
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::Example1d { .. } => "example1d",
            ModelConfig::Bip { .. } => "bip",
            ModelConfig::Logreg { .. } => "logreg",
        }
    }
}

/// Step sizes and caps; `mh_step = None` asks for the acceptance-rate sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSettings {
    pub w: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mh_step: Option<f64>,
    pub max_expand: usize,
    pub max_shrink: usize,
    pub max_reject: usize,
}

impl Default for SamplerSettings {
    fn default() -> Self {
        let d = SamplerConfig::default();
        Self {
            w: d.w,
            mh_step: None,
            max_expand: d.max_expand,
            max_shrink: d.max_shrink,
            max_reject: d.max_reject,
        }
    }
}

impl SamplerSettings {
    fn to_config(self, mh_step: f64) -> SamplerConfig {
        SamplerConfig {
            w: self.w,
            mh_step,
            max_expand: self.max_expand,
            max_shrink: self.max_shrink,
            max_reject: self.max_reject,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub sampler: SamplerKind,
    /// Approximation level of the cheap factor (delayed samplers only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Levels for `sweep`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_grid: Option<Vec<f64>>,
    pub n: usize,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sampler_config: SamplerSettings,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub cost_mode: CostMode,
    /// Write every `thin`-th kept state to the chain file.
    #[serde(default = "one")]
    pub thin: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Summary of a plain run to compute the relative efficiency against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Reads a JSON config. Relative data and baseline paths are resolved
    /// against the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: Self = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match &mut cfg.model {
            ModelConfig::Bip { data, .. } | ModelConfig::Logreg { data, .. } => resolve(data),
            ModelConfig::Example1d { .. } => {}
        }
        if let Some(b) = &mut cfg.baseline {
            resolve(b);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.n >= 1, "n must be at least 1");
        ensure!(self.thin >= 1, "thin must be at least 1");
        if let ModelConfig::Example1d { dim } = self.model {
            ensure!(dim >= 1, "example1d dimension must be at least 1");
        }
        Ok(())
    }
}

/// Command-line overrides shared by `run` and `sweep`.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub thin: Option<usize>,
    pub cost_mode: Option<CostMode>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(t) = self.thin {
            cfg.thin = t;
        }
        if let Some(c) = self.cost_mode {
            cfg.cost_mode = c;
        }
    }
}

pub type Qoi = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A target ready to sample, with its quantity of interest.
pub struct Prepared {
    pub target: FactorizedTarget,
    pub qoi: Qoi,
    pub x0: Vec<f64>,
    /// Approximation level actually used (`None` for plain samplers).
    pub h: Option<f64>,
    /// Level of the reference-fidelity target.
    pub h_ref: Option<f64>,
}

fn example_kind(sampler: SamplerKind) -> ReferenceKind {
    match sampler.kernel() {
        Kernel::DaEss => ReferenceKind::Gaussian { variance: 4.0 },
        Kernel::DaGpss => ReferenceKind::Polar,
        _ => ReferenceKind::Lebesgue,
    }
}

fn default_start(dim: usize, sampler: SamplerKind) -> Vec<f64> {
    if sampler.kernel() == Kernel::DaGpss {
        vec![0.01; dim]
    } else {
        vec![0.0; dim]
    }
}

pub fn read_bip_data(path: &Path) -> Result<BipData> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading BIP data {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing BIP data {}", path.display()))
}

/// Builds the target for `sampler` at level `h` (ignored by plain samplers).
pub fn prepare(cfg: &ExperimentConfig, sampler: SamplerKind, h: Option<f64>) -> Result<Prepared> {
    let h = if sampler.is_plain() { None } else { h };
    let reference = sampler.prior_reference();
    let prepared = match &cfg.model {
        ModelConfig::Example1d { dim } => {
            let dim = *dim;
            let factorized = if dim == 1
                && sampler.kernel() != Kernel::DaEss
                && sampler.kernel() != Kernel::DaGpss
            {
                example1d::target()
            } else {
                example1d::product_target(dim, example_kind(sampler))?
            };
            let target = if !sampler.is_plain() {
                factorized
            } else if dim == 1 && sampler.kernel() == Kernel::DaIdeal {
                example1d::plain_target()
            } else {
                factorized.collapsed()?
            };
            Prepared {
                target,
                qoi: Arc::new(|x: &[f64]| x[0]),
                x0: vec![0.5; dim],
                h: None,
                h_ref: None,
            }
        }
        ModelConfig::Bip { data, .. } => {
            let data = read_bip_data(data)?;
            let model = BipModel::from_data(&data)?;
            if !sampler.is_plain() {
                ensure!(
                    h.is_some(),
                    "delayed-acceptance runs on the bip model need h"
                );
            }
            let target = model.target(h, reference)?;
            let dim = model.dim();
            let h_ref = model.h_ref();
            Prepared {
                target,
                qoi: Arc::new(move |x: &[f64]| model.qoi(x)),
                x0: default_start(dim, sampler),
                h,
                h_ref: Some(h_ref),
            }
        }
        ModelConfig::Logreg { data, .. } => {
            let rows = logreg::logreg_ingest_csv(data)
                .with_context(|| format!("reading logistic data {}", data.display()))?;
            let model = LogRegModel::new(rows, cfg.seed)?;
            if !sampler.is_plain() {
                ensure!(
                    h.is_some(),
                    "delayed-acceptance runs on the logreg model need h"
                );
            }
            let target = model.target(h, reference)?;
            Prepared {
                target,
                qoi: Arc::new(move |x: &[f64]| model.qoi(x)),
                x0: default_start(logreg::DIM, sampler),
                h,
                h_ref: Some(0.0),
            }
        }
    };
    let x0 = cfg.x0.clone().unwrap_or(prepared.x0);
    ensure!(
        x0.len() == prepared.target.dim(),
        "x0 has {} entries, the model has dimension {}",
        x0.len(),
        prepared.target.dim()
    );
    Ok(Prepared { x0, ..prepared })
}

/// Everything a run reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: ExperimentConfig,
    pub model: String,
    pub kernel: Kernel,
    pub plain: bool,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// (coarse, fine) cost weights of the target.
    pub cost_weights: (f64, f64),
    pub report: DiagnosticsReport,
    /// Evaluations of the full-fidelity density per kept iteration: fine
    /// evaluations for delayed samplers, coarse ones for plain samplers.
    pub expensive_evals_per_iter: f64,
    pub burn_in_counts: EvalCounts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mh_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mh_tuning: Option<MhTuning>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accept_stats: Option<AcceptStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_efficiency: Option<f64>,
}

impl RunSummary {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading summary {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing summary {}", path.display()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Output of one sampler run before anything is written.
pub struct RunOutput {
    pub summary: RunSummary,
    pub chain: ChainResult,
    pub qoi: Vec<f64>,
}

fn ensure_dir(path: &Path) -> Result<()> {
    ensure!(
        path.is_dir(),
        "output directory {} does not exist",
        path.display()
    );
    Ok(())
}

/// Runs `sampler` at level `h` under `cfg` without writing files.
pub fn execute(cfg: &ExperimentConfig, sampler: SamplerKind, h: Option<f64>) -> Result<RunOutput> {
    cfg.validate()?;
    let p = prepare(cfg, sampler, h)?;
    let settings = cfg.sampler_config;
    let kernel = sampler.kernel();

    let (mh_step, mh_tuning) = match (kernel, settings.mh_step) {
        (Kernel::DaMh, Some(s)) => (Some(s), None),
        (Kernel::DaMh, None) => {
            let t = tune_mh_step(
                &p.target,
                &p.x0,
                &settings.to_config(1.0),
                cfg.seed,
                &TuningOptions::default(),
            )
            .context("tuning the random-walk step")?;
            (Some(t.step), Some(t))
        }
        _ => (None, None),
    };
    let sampler_config = settings.to_config(mh_step.unwrap_or(1.0));

    let chain = run_chain(
        kernel,
        &p.target,
        &p.x0,
        cfg.n,
        cfg.burn_in,
        cfg.seed,
        &sampler_config,
    )
    .with_context(|| {
        format!(
            "{} run on {} failed",
            sampler_name(sampler),
            cfg.model.name()
        )
    })?;
    let qoi: Vec<f64> = chain.samples.rows().map(|r| (p.qoi)(r)).collect();
    let series = ScalarSeries::new(qoi.clone())
        .context("the quantity of interest needs at least two finite values")?;
    let counts = chain.sampling_counts();
    let wall = (cfg.cost_mode == CostMode::Wall).then_some(chain.wall_seconds);
    let report = DiagnosticsReport::from_series(&series, counts, p.target.cost_weights(), wall)?;
    let expensive = if p.target.is_trivial() {
        counts.coarse
    } else {
        counts.fine
    };

    let mut summary = RunSummary {
        config: cfg.clone(),
        model: cfg.model.name().to_string(),
        kernel,
        plain: sampler.is_plain(),
        dim: p.target.dim(),
        h: p.h,
        cost_weights: p.target.cost_weights(),
        expensive_evals_per_iter: expensive as f64 / cfg.n as f64,
        burn_in_counts: chain.burn_in_ledger,
        mh_step,
        mh_tuning,
        accept_stats: chain.accept_stats,
        relative_efficiency: None,
        report,
    };
    summary.config.sampler = sampler;
    summary.config.h = p.h;
    summary.config.h_grid = None;
    if let Some(b) = &cfg.baseline {
        let base = RunSummary::load(b)?;
        check_compatible(&summary, &base)?;
        summary.relative_efficiency = Some(relative_efficiency(
            &summary.report,
            &base.report,
            cfg.cost_mode,
        )?);
    }
    Ok(RunOutput {
        summary,
        chain,
        qoi,
    })
}

fn sampler_name(s: SamplerKind) -> String {
    serde_json::to_value(s)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

/// Writes `x1..xd,f` for every `thin`-th kept state.
pub fn write_chain(path: &Path, out: &RunOutput, thin: usize) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let dim = out.chain.samples.dim();
    let mut header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    header.push("f".into());
    w.write_record(&header)?;
    for (i, (row, f)) in out.chain.samples.rows().zip(&out.qoi).enumerate() {
        if i % thin != 0 {
            continue;
        }
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(f.to_string());
        w.write_record(&rec)?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(text.as_bytes())
        .with_context(|| format!("writing {}", path.display()))
}

fn write_run(dir: &Path, out: &RunOutput, thin: usize) -> Result<()> {
    write_chain(&dir.join(CHAIN_FILE), out, thin)?;
    write_text(&dir.join(SUMMARY_FILE), &out.summary.to_json()?)
}

/// Where `generate-data` writes: `out` joined with the file name of the
/// configured data path, or the default name when it has none.
fn data_target(out: &Path, data: &Path, default: &str) -> PathBuf {
    out.join(
        data.file_name()
            .map(PathBuf::from)
            .unwrap_or_else(|| default.into()),
    )
}

/// `generate-data`: writes the model's data file into `cfg.out` and returns
/// its path.
pub fn cmd_generate_data(cfg: &ExperimentConfig) -> Result<PathBuf> {
    ensure_dir(&cfg.out)?;
    match &cfg.model {
        ModelConfig::Example1d { .. } => bail!("the example1d model needs no data"),
        ModelConfig::Bip {
            data: target,
            dim,
            sigma2,
            h_ref,
        } => {
            let data = bip::bip_generate_data(cfg.seed, *dim, *sigma2, *h_ref)?;
            let path = data_target(&cfg.out, target, BIP_DATA_FILE);
            write_text(&path, &(serde_json::to_string_pretty(&data)? + "\n"))?;
            Ok(path)
        }
        ModelConfig::Logreg { data, m, x_true } => {
            let x_true = x_true.clone().unwrap_or(logreg::DEFAULT_X_TRUE.to_vec());
            let rows = logreg::logreg_generate_synthetic(cfg.seed, *m, &x_true)?;
            let path = data_target(&cfg.out, data, LOGREG_DATA_FILE);
            let file =
                fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            logreg::write_csv(std::io::BufWriter::new(file), &rows)
                .with_context(|| format!("writing {}", path.display()))?;
            Ok(path)
        }
    }
}

/// `run`: one chain, its CSV and its summary.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<RunSummary> {
    ensure_dir(&cfg.out)?;
    let out = execute(cfg, cfg.sampler, cfg.h)
        .with_context(|| format!("config: {}", serde_json::to_string(cfg).unwrap_or_default()))?;
    write_run(&cfg.out, &out, cfg.thin)?;
    Ok(out.summary)
}

/// One line of the sweep's plot data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub h: f64,
    /// Cost under the configured cost mode: seconds or weighted evaluations.
    pub t_total: f64,
    pub n_eff: f64,
    pub n_coarse: u64,
    pub n_fine: u64,
    pub relative_efficiency: f64,
}

/// Result of a sweep: the baseline, the cells that succeeded and the errors
/// of those that did not.
pub struct SweepOutcome {
    pub baseline: RunSummary,
    pub cells: Vec<(f64, RunSummary)>,
    pub failures: Vec<(f64, String)>,
    pub rows: Vec<PlotRow>,
}

impl SweepOutcome {
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty()
    }
}

fn cell_dir(out: &Path, i: usize) -> PathBuf {
    out.join(format!("h_{i:02}"))
}

/// `sweep`: the plain sampler at the reference level plus the delayed
/// sampler at every level of `h_grid`, run concurrently. Failed cells are
/// recorded and the rest still run.
pub fn cmd_sweep(cfg: &ExperimentConfig, exec: Execution) -> Result<SweepOutcome> {
    cfg.validate()?;
    ensure_dir(&cfg.out)?;
    let grid = cfg
        .h_grid
        .clone()
        .ok_or_else(|| anyhow!("sweep needs h_grid"))?;
    ensure!(!grid.is_empty(), "h_grid is empty");
    for (i, a) in grid.iter().enumerate() {
        ensure!(!grid[..i].contains(a), "h = {a} appears twice in h_grid");
    }
    ensure!(
        !matches!(cfg.model, ModelConfig::Example1d { .. }),
        "the example1d model has no approximation level to sweep"
    );

    // index 0 is the baseline
    let jobs: Vec<(SamplerKind, Option<f64>)> = std::iter::once((cfg.sampler.plain(), None))
        .chain(grid.iter().map(|h| (cfg.sampler.delayed(), Some(*h))))
        .collect();
    let results = map_indexed(exec, jobs.len(), |i| -> Result<RunSummary> {
        let (sampler, h) = jobs[i];
        let dir = if i == 0 {
            cfg.out.join("baseline")
        } else {
            cell_dir(&cfg.out, i - 1)
        };
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut cell = cfg.clone();
        cell.baseline = None;
        let out = execute(&cell, sampler, h)?;
        write_run(&dir, &out, cfg.thin)?;
        Ok(out.summary)
    });

    let mut results = results.into_iter();
    let baseline = results.next().expect("baseline job")?;
    let h_ref = match &cfg.model {
        ModelConfig::Bip { data, .. } => read_bip_data(data)?.h_ref,
        _ => 0.0,
    };
    let row = |h: f64, s: &RunSummary| -> Result<PlotRow> {
        Ok(PlotRow {
            h,
            t_total: s.report.cost(cfg.cost_mode)?,
            n_eff: s.report.n_eff,
            n_coarse: s.report.n_coarse,
            n_fine: s.report.n_fine,
            relative_efficiency: relative_efficiency(&s.report, &baseline.report, cfg.cost_mode)?,
        })
    };
    let mut rows = vec![row(h_ref, &baseline)?];
    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for (h, res) in grid.iter().zip(results) {
        match res {
            Ok(mut s) => {
                let r = row(*h, &s)?;
                s.relative_efficiency = Some(r.relative_efficiency);
                rows.push(r);
                cells.push((*h, s));
            }
            Err(e) => failures.push((*h, format!("{e:#}"))),
        }
    }
    // rewrite cell summaries with their efficiency against the baseline
    for (i, h) in grid.iter().enumerate() {
        if let Some((_, s)) = cells.iter().find(|(ch, _)| ch == h) {
            write_text(&cell_dir(&cfg.out, i).join(SUMMARY_FILE), &s.to_json()?)?;
        }
    }

    let path = cfg.out.join(PLOT_FILE);
    let mut w =
        csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(SweepOutcome {
        baseline,
        cells,
        failures,
        rows,
    })
}

/// Relative efficiency of `da` against `plain` under both cost modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub model: String,
    pub n: usize,
    /// `None` when either summary was produced without wall time.
    pub wall: Option<f64>,
    pub evals: f64,
}

fn check_compatible(a: &RunSummary, b: &RunSummary) -> Result<()> {
    ensure!(
        a.model == b.model,
        "model mismatch: {} vs {}",
        a.model,
        b.model
    );
    ensure!(
        a.report.n == b.report.n,
        "chain length mismatch: {} vs {}",
        a.report.n,
        b.report.n
    );
    ensure!(a.dim == b.dim, "dimension mismatch: {} vs {}", a.dim, b.dim);
    Ok(())
}

/// `compare`: efficiency of the first summary relative to the second.
pub fn cmd_compare(da: &RunSummary, plain: &RunSummary) -> Result<Comparison> {
    check_compatible(da, plain)?;
    let wall = match (da.report.wall_seconds, plain.report.wall_seconds) {
        (Some(_), Some(_)) => Some(relative_efficiency(
            &da.report,
            &plain.report,
            CostMode::Wall,
        )?),
        _ => None,
    };
    Ok(Comparison {
        model: da.model.clone(),
        n: da.report.n,
        wall,
        evals: relative_efficiency(&da.report, &plain.report, CostMode::WeightedEvals)?,
    })
}
