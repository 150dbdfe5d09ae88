//! Distortion and rate metrics between an original and a reconstructed grid.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::DataGrid;

pub const DEFAULT_AUTOCORR_LAGS: usize = 100;

/// Correlation level commonly required for climate data ("five nines").
pub const FIVE_NINES: f64 = 0.99999;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub points: usize,
    pub value_range: f64,
    pub max_abs_error: f64,
    /// `max_abs_error / value_range`; `inf` on a constant original with
    /// nonzero error.
    pub max_rel_error: f64,
    pub rmse: f64,
    pub nrmse: f64,
    /// Decibels; `+inf` when `rmse == 0`.
    pub psnr: f64,
    pub pearson: f64,
    pub compression_factor: f64,
    pub bit_rate: f64,
    /// Autocorrelation of the error series at lags `0..=L`. All zeros when
    /// the error has no variance.
    pub autocorr: Vec<f64>,
}

/// Flat CSV row for a [`MetricsReport`].
///
/// Columns: `label, points, value_range, max_abs_error, max_rel_error,
/// rmse, nrmse, psnr, pearson, compression_factor, bit_rate,
/// autocorr_lag1`. Infinite values are written as `inf`.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsRow {
    pub label: String,
    pub points: usize,
    pub value_range: f64,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub rmse: f64,
    pub nrmse: f64,
    pub psnr: f64,
    pub pearson: f64,
    pub compression_factor: f64,
    pub bit_rate: f64,
    pub autocorr_lag1: f64,
}

impl MetricsReport {
    pub fn to_row(&self, label: impl Into<String>) -> MetricsRow {
        MetricsRow {
            label: label.into(),
            points: self.points,
            value_range: self.value_range,
            max_abs_error: self.max_abs_error,
            max_rel_error: self.max_rel_error,
            rmse: self.rmse,
            nrmse: self.nrmse,
            psnr: self.psnr,
            pearson: self.pearson,
            compression_factor: self.compression_factor,
            bit_rate: self.bit_rate,
            autocorr_lag1: self.autocorr.get(1).copied().unwrap_or(0.0),
        }
    }

    pub fn meets_five_nines(&self) -> bool {
        self.pearson >= FIVE_NINES
    }
}

pub fn compression_factor(original_bytes: usize, compressed_bytes: usize) -> Result<f64> {
    if compressed_bytes == 0 {
        return Err(Error::InvalidArgument("compressed size is zero".into()));
    }
    if original_bytes == 0 {
        return Err(Error::InvalidArgument("original size is zero".into()));
    }
    Ok(original_bytes as f64 / compressed_bytes as f64)
}

/// Compressed bits per data point.
pub fn bit_rate(compressed_bytes: usize, points: usize) -> Result<f64> {
    if compressed_bytes == 0 {
        return Err(Error::InvalidArgument("compressed size is zero".into()));
    }
    if points == 0 {
        return Err(Error::EmptyGrid);
    }
    Ok(compressed_bytes as f64 * 8.0 / points as f64)
}

pub fn psnr(value_range: f64, rmse: f64) -> f64 {
    if rmse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (value_range / rmse).log10()
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Pearson correlation by the two-pass (mean-subtracted) formula.
///
/// If either series is constant the coefficient is undefined; we report 1
/// when the series are identical and 0 otherwise.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return if x == y { 1.0 } else { 0.0 };
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Sample autocorrelation at lags `0..=max_lag`, normalised by the lag-0
/// sum of squares.
pub fn autocorrelation(series: &[f64], max_lag: usize) -> Vec<f64> {
    let m = mean(series);
    let centered: Vec<f64> = series.iter().map(|v| v - m).collect();
    let denom: f64 = centered.iter().map(|v| v * v).sum();
    (0..=max_lag)
        .map(|lag| {
            if denom == 0.0 || lag >= centered.len() {
                return 0.0;
            }
            let num: f64 = centered.iter().zip(&centered[lag..]).map(|(a, b)| a * b).sum();
            num / denom
        })
        .collect()
}

pub fn compute_metrics(
    original: &DataGrid,
    reconstructed: &DataGrid,
    compressed_size: usize,
) -> Result<MetricsReport> {
    compute_metrics_with_lags(original, reconstructed, compressed_size, DEFAULT_AUTOCORR_LAGS)
}

pub fn compute_metrics_with_lags(
    original: &DataGrid,
    reconstructed: &DataGrid,
    compressed_size: usize,
    lags: usize,
) -> Result<MetricsReport> {
    if original.dims() != reconstructed.dims() {
        return Err(Error::DimsMismatch(original.dims().to_vec(), reconstructed.dims().to_vec()));
    }
    let n = original.len();
    let range = original.range()?;
    let errors: Vec<f64> = original.values().iter().zip(reconstructed.values()).map(|(a, b)| a - b).collect();
    let max_abs_error = errors.iter().fold(0.0f64, |acc, e| acc.max(e.abs()));
    let rmse = (errors.iter().map(|e| e * e).sum::<f64>() / n as f64).sqrt();
    let normalise = |v: f64| {
        if range > 0.0 {
            v / range
        } else if v == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    Ok(MetricsReport {
        points: n,
        value_range: range,
        max_abs_error,
        max_rel_error: normalise(max_abs_error),
        rmse,
        nrmse: normalise(rmse),
        psnr: psnr(range, rmse),
        pearson: pearson(original.values(), reconstructed.values()),
        compression_factor: compression_factor(original.byte_size(), compressed_size)?,
        bit_rate: bit_rate(compressed_size, n)?,
        autocorr: autocorrelation(&errors, lags),
    })
}

/// Write rows as CSV with a header line.
pub fn write_csv<W: std::io::Write, R: Serialize>(out: W, rows: &[R]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(std::io::Error::other)?;
    }
    w.flush()
}
