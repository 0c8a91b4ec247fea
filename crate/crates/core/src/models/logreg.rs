//! Bayesian logistic regression with a subsampled, tempered likelihood as the
//! cheap factor.
//!
//! Coefficients are `x = (x0, x1, ..., x6)`: an intercept plus one weight per
//! feature. The cheap factor at `h` uses the first `m_app(h)` rows of a fixed
//! shuffle, raised to the power `m / m_app(h)`.

use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;

use super::{prior_target, PriorReference};
use crate::rng::{standard_normal_vec, stream_rng, uniform, Stream};
use crate::target::{DensityFactor, FactorizedTarget, GaussianReference};
use crate::{Error, Result};

pub const N_FEATURES: usize = 6;
pub const DIM: usize = N_FEATURES + 1;
pub const PRIOR_VARIANCE: f64 = 0.01;
pub const CSV_HEADER: [&str; 7] = ["xi1", "xi2", "xi3", "xi4", "xi5", "xi6", "delta"];
/// Coefficients used for synthetic data unless configured otherwise.
pub const DEFAULT_X_TRUE: [f64; DIM] = [0.1, 0.2, -0.15, 0.1, 0.05, -0.1, 0.15];

/// One observation: features and a label in `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    xi: [f64; N_FEATURES],
    delta: f64,
}

impl Row {
    pub fn new(xi: [f64; N_FEATURES], delta: f64) -> Result<Self> {
        if delta != 1.0 && delta != -1.0 {
            return Err(Error::InvalidArgument(format!(
                "label {delta} is not -1 or 1"
            )));
        }
        if xi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("feature is not finite".into()));
        }
        Ok(Self { xi, delta })
    }

    pub fn xi(&self) -> &[f64; N_FEATURES] {
        &self.xi
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// `log(1 + e^a)` without overflow.
fn softplus(a: f64) -> f64 {
    if a > 0.0 {
        a + (-a).exp().ln_1p()
    } else {
        a.exp().ln_1p()
    }
}

/// `log L(delta, xi; x) = -log(1 + exp(-delta (x0 + w . xi)))`.
pub fn log_l(delta: f64, xi: &[f64; N_FEATURES], x: &[f64]) -> f64 {
    let z = x[0] + x[1..].iter().zip(xi).map(|(w, v)| w * v).sum::<f64>();
    -softplus(-delta * z)
}

fn sum_log_l(x: &[f64], rows: &[Row]) -> f64 {
    rows.iter().map(|r| log_l(r.delta, &r.xi, x)).sum()
}

/// `(m / m_app) * sum_{i <= m_app} log L(delta_i, xi_i; x)`.
pub fn logreg_log_likelihood(x: &[f64], rows: &[Row], m_app: usize, m: usize) -> Result<f64> {
    if x.len() != DIM {
        return Err(Error::DimensionMismatch {
            expected: DIM,
            got: x.len(),
        });
    }
    if m_app == 0 || m_app > m || m > rows.len() {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= m_app ({m_app}) <= m ({m}) <= rows ({})",
            rows.len()
        )));
    }
    Ok(m as f64 / m_app as f64 * sum_log_l(x, &rows[..m_app]))
}

/// `round((1 - h) m)`.
pub fn m_app(h: f64, m: usize) -> Result<usize> {
    if !(0.0..1.0).contains(&h) {
        return Err(Error::InvalidArgument(format!(
            "subsampling level {h} not in [0, 1)"
        )));
    }
    let k = ((1.0 - h) * m as f64).round() as usize;
    if k == 0 {
        return Err(Error::InvalidArgument(format!(
            "h = {h} leaves no rows out of {m}"
        )));
    }
    Ok(k)
}

/// Reads the CSV layout `xi1,...,xi6,delta`.
pub fn read_csv(reader: impl Read) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    if header.iter().map(str::trim).ne(CSV_HEADER) {
        return Err(Error::MalformedRow {
            row: 0,
            message: format!("expected header {}", CSV_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::MalformedRow {
            row,
            message: e.to_string(),
        })?;
        if rec.len() != DIM {
            return Err(Error::MalformedRow {
                row,
                message: format!("expected {DIM} fields, found {}", rec.len()),
            });
        }
        let mut vals = [0.0; DIM];
        for (j, field) in rec.iter().enumerate() {
            vals[j] = field.trim().parse().map_err(|_| Error::MalformedRow {
                row,
                message: format!("field {} ({field:?}) is not a number", CSV_HEADER[j]),
            })?;
        }
        let xi: [f64; N_FEATURES] = vals[..N_FEATURES].try_into().expect("six features");
        rows.push(
            Row::new(xi, vals[N_FEATURES]).map_err(|e| Error::MalformedRow {
                row,
                message: e.to_string(),
            })?,
        );
    }
    Ok(rows)
}

pub fn logreg_ingest_csv(path: &Path) -> Result<Vec<Row>> {
    read_csv(std::fs::File::open(path)?)
}

pub fn write_csv(writer: impl Write, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let mut rec: Vec<String> = r.xi.iter().map(|v| v.to_string()).collect();
        rec.push(format!("{}", r.delta as i32));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `xi ~ N(0, I6)` and `delta = +1` with probability `L(+1, xi; x_true)`.
pub fn logreg_generate_synthetic(seed: u64, m: usize, x_true: &[f64]) -> Result<Vec<Row>> {
    if x_true.len() != DIM {
        return Err(Error::DimensionMismatch {
            expected: DIM,
            got: x_true.len(),
        });
    }
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one row".into()));
    }
    let mut rng = stream_rng(seed, Stream::Data);
    (0..m)
        .map(|_| {
            let xi: [f64; N_FEATURES] = standard_normal_vec(&mut rng, N_FEATURES)
                .try_into()
                .expect("six");
            let p = log_l(1.0, &xi, x_true).exp();
            Row::new(xi, if uniform(&mut rng) < p { 1.0 } else { -1.0 })
        })
        .collect()
}

/// Shuffled data with the first shuffled row held out for the quantity of
/// interest `f(x) = L(1, xi_held; x)`.
#[derive(Debug, Clone)]
pub struct LogRegModel {
    rows: Vec<Row>,
    held_out: Row,
    prior: GaussianReference,
}

impl LogRegModel {
    pub fn new(mut rows: Vec<Row>, seed: u64) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InvalidArgument("need at least two rows".into()));
        }
        rows.shuffle(&mut stream_rng(seed, Stream::Shuffle));
        let held_out = rows.remove(0);
        Ok(Self {
            rows,
            held_out,
            prior: GaussianReference::isotropic(DIM, PRIOR_VARIANCE)?,
        })
    }

    /// Rows used for inference (`m` of them).
    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn held_out(&self) -> &Row {
        &self.held_out
    }

    pub fn prior(&self) -> &GaussianReference {
        &self.prior
    }

    /// Rows behind the cheap factor at `h`; nested prefixes as `h` grows.
    pub fn subset(&self, h: f64) -> Result<&[Row]> {
        Ok(&self.rows[..m_app(h, self.m())?])
    }

    pub fn log_likelihood(&self, x: &[f64], h: f64) -> Result<f64> {
        logreg_log_likelihood(x, &self.rows, m_app(h, self.m())?, self.m())
    }

    pub fn qoi(&self, x: &[f64]) -> f64 {
        log_l(1.0, &self.held_out.xi, x).exp()
    }

    /// Plain target (`h = None`) or the subsampled factorization at `h`.
    /// Cost weights count likelihood terms: `m_app` for the cheap factor and
    /// `m` for the ratio, which is one pass over all rows.
    pub fn target(&self, h: Option<f64>, reference: PriorReference) -> Result<FactorizedTarget> {
        let m = self.m();
        let rows = std::sync::Arc::new(self.rows.clone());
        match h {
            None => {
                let r = rows.clone();
                let full = DensityFactor::new(DIM, move |x| sum_log_l(x, &r)).with_cost(m as f64);
                prior_target(full, None, &self.prior, reference)
            }
            Some(h) => {
                let k = m_app(h, m)?;
                let temper = m as f64 / k as f64;
                let r = rows.clone();
                let coarse = DensityFactor::new(DIM, move |x| temper * sum_log_l(x, &r[..k]))
                    .with_cost(k as f64);
                let r = rows;
                let ratio = DensityFactor::new(DIM, move |x| {
                    let head = sum_log_l(x, &r[..k]);
                    let tail = sum_log_l(x, &r[k..]);
                    head + tail - temper * head
                })
                .with_cost(m as f64);
                prior_target(coarse, Some(ratio), &self.prior, reference)
            }
        }
    }
}
