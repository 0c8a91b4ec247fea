//! Autocorrelation, effective sample size, asymptotic variance, KS distance
//! and the relative-efficiency criterion.

use serde::{Deserialize, Serialize};

use crate::ledger::EvalCounts;
use crate::{Error, Result};

/// Largest autocovariance lag the estimators look at.
pub const MAX_LAG: usize = 10_000;

/// Values `f(X_1), ..., f(X_n)` of a quantity of interest along a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSeries {
    values: Vec<f64>,
}

impl ScalarSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "series needs at least 2 values, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "series value {i} is not finite"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    fn centered(&self) -> Vec<f64> {
        let m = self.mean();
        self.values.iter().map(|v| v - m).collect()
    }
}

fn lag_cov(z: &[f64], lag: usize) -> f64 {
    let n = z.len();
    z[..n - lag]
        .iter()
        .zip(&z[lag..])
        .map(|(a, b)| a * b)
        .sum::<f64>()
        / n as f64
}

/// Biased (1/n-normalized) sample autocovariances for lags `0..=max_lag`.
pub fn autocovariance(series: &ScalarSeries, max_lag: usize) -> Result<Vec<f64>> {
    if max_lag >= series.len() {
        return Err(Error::InvalidArgument(format!(
            "max_lag {max_lag} must be below the series length {}",
            series.len()
        )));
    }
    let z = series.centered();
    let gamma: Vec<f64> = (0..=max_lag).map(|k| lag_cov(&z, k)).collect();
    if gamma[0] <= 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok(gamma)
}

/// Internals of the initial-positive-sequence estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct GeyerEstimate {
    pub n: usize,
    pub gamma0: f64,
    /// Sums `gamma_{2m} + gamma_{2m+1}` that were kept (all positive).
    pub pair_sums: Vec<f64>,
    /// Number of autocovariance lags used: `2 * pair_sums.len()`.
    pub truncation_lag: usize,
    /// Integrated autocorrelation time `1 + 2 sum_j rho_j`.
    pub tau: f64,
    pub n_eff: f64,
}

/// Effective sample size with Geyer's initial positive sequence truncation.
///
/// Autocovariances are computed lazily, pair by pair, up to
/// `min(n - 1, MAX_LAG)`; the sum stops at the first non-positive pair.
/// `n_eff` is clamped to `(0, 2n]`.
pub fn geyer(series: &ScalarSeries) -> Result<GeyerEstimate> {
    let n = series.len();
    let z = series.centered();
    let gamma0 = lag_cov(&z, 0);
    if gamma0 <= 0.0 {
        return Err(Error::ConstantSeries);
    }
    let max_lag = (n - 1).min(MAX_LAG);
    let mut pair_sums = Vec::new();
    let mut m = 0;
    while 2 * m < max_lag {
        let g_even = if m == 0 { gamma0 } else { lag_cov(&z, 2 * m) };
        let pair = g_even + lag_cov(&z, 2 * m + 1);
        if pair <= 0.0 {
            break;
        }
        pair_sums.push(pair);
        m += 1;
    }
    let tau = (2.0 * pair_sums.iter().sum::<f64>() - gamma0) / gamma0;
    let nf = n as f64;
    let n_eff = if tau <= 0.5 {
        2.0 * nf
    } else {
        (nf / tau).min(2.0 * nf)
    };
    Ok(GeyerEstimate {
        n,
        gamma0,
        truncation_lag: 2 * pair_sums.len(),
        pair_sums,
        tau,
        n_eff,
    })
}

pub fn ess(series: &ScalarSeries) -> Result<f64> {
    Ok(geyer(series)?.n_eff)
}

/// `gamma0 * n / n_eff`, the variance rate of the path average.
pub fn asymptotic_variance(series: &ScalarSeries) -> Result<f64> {
    let g = geyer(series)?;
    Ok(g.gamma0 * g.n as f64 / g.n_eff)
}

/// Sup distance between the empirical CDF of `sample` and `cdf`.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    Ok(d.clamp(0.0, 1.0))
}

/// What counts as the cost of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CostMode {
    #[serde(rename = "wall")]
    Wall,
    #[default]
    #[serde(rename = "evals", alias = "weighted_evals")]
    WeightedEvals,
}

impl std::str::FromStr for CostMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wall" => Ok(CostMode::Wall),
            "evals" | "weighted_evals" => Ok(CostMode::WeightedEvals),
            other => Err(Error::InvalidArgument(format!(
                "unknown cost mode {other:?}"
            ))),
        }
    }
}

/// Accuracy and cost summary of one chain for one quantity of interest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub n: usize,
    pub n_eff: f64,
    pub asym_var: f64,
    pub mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_seconds: Option<f64>,
    pub n_coarse: u64,
    pub n_fine: u64,
    /// Evaluation counts combined with the factors' cost weights.
    pub weighted_cost: f64,
}

impl DiagnosticsReport {
    /// `weights` are the (coarse, fine) cost weights of the target.
    pub fn from_series(
        series: &ScalarSeries,
        counts: EvalCounts,
        weights: (f64, f64),
        wall_seconds: Option<f64>,
    ) -> Result<Self> {
        let g = geyer(series)?;
        Ok(Self {
            n: series.len(),
            n_eff: g.n_eff,
            asym_var: g.gamma0 * g.n as f64 / g.n_eff,
            mean: series.mean(),
            wall_seconds,
            n_coarse: counts.coarse,
            n_fine: counts.fine,
            weighted_cost: counts.weighted(weights.0, weights.1),
        })
    }

    pub fn cost(&self, mode: CostMode) -> Result<f64> {
        match mode {
            CostMode::Wall => self.wall_seconds.ok_or(Error::MissingWallTime),
            CostMode::WeightedEvals => Ok(self.weighted_cost),
        }
    }
}

/// `(n_eff_da / n_eff_plain) * (cost_plain / cost_da)`.
pub fn relative_efficiency(
    da: &DiagnosticsReport,
    plain: &DiagnosticsReport,
    mode: CostMode,
) -> Result<f64> {
    let cost_da = da.cost(mode)?;
    let cost_plain = plain.cost(mode)?;
    if cost_da <= 0.0 {
        return Err(Error::ZeroCost);
    }
    Ok(da.n_eff / plain.n_eff * (cost_plain / cost_da))
}
