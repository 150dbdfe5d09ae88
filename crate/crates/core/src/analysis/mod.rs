//! Experiment drivers: layer selection, interval-count sweeps and
//! rate-distortion curves.

pub mod generators;

use serde::Serialize;

use crate::codec::{compress, decompress, quantize_pass};
use crate::config::{CompressorConfig, ErrorBoundSpec};
use crate::error::{Error, Result};
use crate::grid::DataGrid;
use crate::metrics::compute_metrics;
use crate::predictor::Predictor;
use crate::quantizer::IntervalQuantizer;

pub use generators::Generator;

pub const MAX_SCAN_LAYERS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerRow {
    pub layers: usize,
    /// Share of points within `eb` of a prediction made from original values.
    pub hitting_rate_original: f64,
    /// Codec hitting rate, predicting from reconstructed values.
    pub hitting_rate_decompressed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerReport {
    pub error_bound: f64,
    pub interval_exponent: u32,
    pub rows: Vec<LayerRow>,
    /// Layer count with the best decompressed hitting rate, smallest on ties.
    pub recommended: usize,
}

/// Fraction of points whose prediction from *original* neighbours lies
/// within `eb` of the true value.
pub fn original_hitting_rate(grid: &DataGrid, layers: usize, eb: f64) -> Result<f64> {
    let predictor = Predictor::new(layers, grid.dims())?;
    let mut buffer = grid.values().to_vec();
    let values = grid.values();
    let mut hits = 0usize;
    predictor.scan(&mut buffer, |i, pred, _| {
        if (values[i] - pred).abs() <= eb {
            hits += 1;
        }
    });
    Ok(hits as f64 / grid.len() as f64)
}

/// Codec hitting rate without the entropy-coding stage.
pub fn decompressed_hitting_rate(grid: &DataGrid, layers: usize, eb: f64, m: u32) -> Result<f64> {
    let predictor = Predictor::new(layers, grid.dims())?;
    let quantizer = IntervalQuantizer::new(eb, m)?;
    let pass = quantize_pass(grid.values(), grid.width(), &predictor, &quantizer);
    Ok((grid.len() - pass.unpredictable.len()) as f64 / grid.len() as f64)
}

pub fn best_layer_scan(grid: &DataGrid, config: &CompressorConfig, layers: &[usize]) -> Result<LayerReport> {
    if layers.is_empty() {
        return Err(Error::InvalidArgument("layer set is empty".into()));
    }
    let mut layers = layers.to_vec();
    layers.sort_unstable();
    layers.dedup();
    if let Some(&bad) = layers.iter().find(|&&n| n == 0 || n > MAX_SCAN_LAYERS) {
        return Err(Error::InvalidLayers(bad));
    }
    config.validate()?;
    let eb = config.bound.effective_bound(grid)?;
    let m = config.interval_exponent;
    let rows = layers
        .iter()
        .map(|&n| {
            Ok(LayerRow {
                layers: n,
                hitting_rate_original: original_hitting_rate(grid, n, eb)?,
                hitting_rate_decompressed: decompressed_hitting_rate(grid, n, eb, m)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = rows[0];
    for r in &rows[1..] {
        if r.hitting_rate_decompressed > best.hitting_rate_decompressed {
            best = *r;
        }
    }
    Ok(LayerReport { error_bound: eb, interval_exponent: m, rows, recommended: best.layers })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub rel_bound: f64,
    pub interval_exponent: u32,
    pub intervals: u32,
    pub hitting_rate: f64,
    /// Smallest exponent in the sweep reaching the threshold at this bound.
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSweep {
    pub rel_bounds: Vec<f64>,
    pub exponents: Vec<u32>,
    /// `rates[b][e]` for `rel_bounds[b]`, `exponents[e]`.
    pub rates: Vec<Vec<f64>>,
    pub threshold: f64,
    /// Per bound: the smallest exponent with rate >= threshold, if any.
    pub selected: Vec<Option<u32>>,
}

impl IntervalSweep {
    pub fn rows(&self) -> Vec<SweepRow> {
        let mut out = Vec::new();
        for (b, &rel) in self.rel_bounds.iter().enumerate() {
            for (e, &m) in self.exponents.iter().enumerate() {
                out.push(SweepRow {
                    rel_bound: rel,
                    interval_exponent: m,
                    intervals: (1u32 << m) - 1,
                    hitting_rate: self.rates[b][e],
                    selected: self.selected[b] == Some(m),
                });
            }
        }
        out
    }

    /// Bounds at which none of the swept exponents was sufficient.
    pub fn needs_more_intervals(&self) -> Vec<f64> {
        self.rel_bounds.iter().zip(&self.selected).filter(|(_, s)| s.is_none()).map(|(&b, _)| b).collect()
    }
}

/// Hitting rate for every (relative bound, interval exponent) pair.
///
/// `config` supplies the layer count and threshold; its bound is ignored.
pub fn interval_sweep(
    grid: &DataGrid,
    config: &CompressorConfig,
    rel_bounds: &[f64],
    exponents: &[u32],
) -> Result<IntervalSweep> {
    if rel_bounds.is_empty() || exponents.is_empty() {
        return Err(Error::InvalidArgument("sweep lists must be nonempty".into()));
    }
    let mut exponents = exponents.to_vec();
    exponents.sort_unstable();
    exponents.dedup();
    for &m in &exponents {
        config.with_interval_exponent(m).validate()?;
    }
    let range = grid.range()?;
    let mut rates = Vec::with_capacity(rel_bounds.len());
    let mut selected = Vec::with_capacity(rel_bounds.len());
    for &rel in rel_bounds {
        let eb = ErrorBoundSpec::relative(rel)?.effective_for_range(range)?;
        let row = exponents
            .iter()
            .map(|&m| decompressed_hitting_rate(grid, config.layers, eb, m))
            .collect::<Result<Vec<_>>>()?;
        selected.push(
            exponents.iter().zip(&row).find(|(_, &r)| r >= config.hitting_rate_threshold).map(|(&m, _)| m),
        );
        rates.push(row);
    }
    Ok(IntervalSweep {
        rel_bounds: rel_bounds.to_vec(),
        exponents,
        rates,
        threshold: config.hitting_rate_threshold,
        selected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub abs_bound: Option<f64>,
    pub rel_bound: Option<f64>,
    pub error_bound: f64,
    pub bit_rate: f64,
    pub psnr: f64,
    pub compression_factor: f64,
    pub rmse: f64,
    pub max_abs_error: f64,
    pub pearson: f64,
    pub hitting_rate: f64,
}

/// One compress/decompress/measure cycle per bound, sorted by bit rate.
pub fn rate_distortion_sweep(
    grid: &DataGrid,
    config: &CompressorConfig,
    bounds: &[ErrorBoundSpec],
) -> Result<Vec<RatePoint>> {
    if bounds.is_empty() {
        return Err(Error::InvalidArgument("bound list is empty".into()));
    }
    let mut points = bounds
        .iter()
        .map(|&bound| {
            let cfg = CompressorConfig { bound, ..*config };
            let outcome = compress(grid, &cfg)?;
            let size = outcome.stream.byte_size();
            let rec = decompress(&outcome.stream)?;
            let m = compute_metrics(grid, &rec, size)?;
            Ok(RatePoint {
                abs_bound: bound.absolute_part(),
                rel_bound: bound.relative_part(),
                error_bound: outcome.stream.header.error_bound,
                bit_rate: m.bit_rate,
                psnr: m.psnr,
                compression_factor: m.compression_factor,
                rmse: m.rmse,
                max_abs_error: m.max_abs_error,
                pearson: m.pearson,
                hitting_rate: outcome.hitting_rate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    points.sort_by(|a, b| a.bit_rate.total_cmp(&b.bit_rate));
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ElementWidth;

    #[test]
    fn constant_grid_layers_tie_to_one() {
        let g = Generator::Constant.generate(&[20, 20], 1, ElementWidth::F64).unwrap();
        let cfg = CompressorConfig::new(ErrorBoundSpec::absolute(1e-3).unwrap());
        let r = best_layer_scan(&g, &cfg, &[1, 2, 3, 4]).unwrap();
        assert_eq!(r.rows.len(), 4);
        for row in &r.rows {
            assert!(row.hitting_rate_decompressed * 400.0 >= 399.0 - 1e-9);
            assert!(row.hitting_rate_original * 400.0 >= 399.0 - 1e-9);
        }
        assert_eq!(r.recommended, 1);
    }

    #[test]
    fn layer_set_validation() {
        let g = Generator::Sines.generate(&[8, 8], 1, ElementWidth::F64).unwrap();
        let cfg = CompressorConfig::new(ErrorBoundSpec::relative(1e-3).unwrap());
        assert!(best_layer_scan(&g, &cfg, &[]).is_err());
        assert_eq!(best_layer_scan(&g, &cfg, &[1, 5]), Err(Error::InvalidLayers(5)));
    }

    #[test]
    fn sweep_rejects_empty_lists() {
        let g = Generator::Sines.generate(&[8, 8], 1, ElementWidth::F64).unwrap();
        let cfg = CompressorConfig::new(ErrorBoundSpec::relative(1e-3).unwrap());
        assert!(interval_sweep(&g, &cfg, &[], &[8]).is_err());
        assert!(interval_sweep(&g, &cfg, &[1e-3], &[]).is_err());
        assert!(rate_distortion_sweep(&g, &cfg, &[]).is_err());
    }

    #[test]
    fn constant_grid_psnr_is_infinite() {
        // The origin predicts 0, so the constant must sit farther than every
        // bound from 0 for the first point to be stored verbatim.
        let g = DataGrid::new(vec![16, 16], vec![7.0; 256], ElementWidth::F32).unwrap();
        let cfg = CompressorConfig::new(ErrorBoundSpec::absolute(1e-3).unwrap());
        let bounds: Vec<_> =
            [1e-1, 1e-3, 1e-5].iter().map(|&b| ErrorBoundSpec::absolute(b).unwrap()).collect();
        let pts = rate_distortion_sweep(&g, &cfg, &bounds).unwrap();
        assert!(pts.iter().all(|p| p.psnr == f64::INFINITY));
    }
}
