use crate::error::{Error, Result};
use crate::grid::DataGrid;

pub const MAX_LAYERS: usize = 8;
pub const MIN_INTERVAL_EXPONENT: u32 = 2;
pub const MAX_INTERVAL_EXPONENT: u32 = 16;

/// Absolute and/or value-range-relative error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBoundSpec {
    absolute: Option<f64>,
    relative: Option<f64>,
}

impl ErrorBoundSpec {
    pub fn new(absolute: Option<f64>, relative: Option<f64>) -> Result<Self> {
        if absolute.is_none() && relative.is_none() {
            return Err(Error::MissingBound);
        }
        for b in absolute.iter().chain(relative.iter()) {
            if !b.is_finite() || *b < 0.0 {
                return Err(Error::InvalidBound(*b));
            }
        }
        Ok(Self { absolute, relative })
    }

    pub fn absolute(eb: f64) -> Result<Self> {
        Self::new(Some(eb), None)
    }

    pub fn relative(eb: f64) -> Result<Self> {
        Self::new(None, Some(eb))
    }

    pub fn both(abs: f64, rel: f64) -> Result<Self> {
        Self::new(Some(abs), Some(rel))
    }

    pub fn absolute_part(&self) -> Option<f64> {
        self.absolute
    }

    pub fn relative_part(&self) -> Option<f64> {
        self.relative
    }

    /// The bound actually enforced for a grid with value range `range`.
    ///
    /// When both members are present the smaller one wins. On a constant
    /// grid (`range == 0`) the relative member carries no information and is
    /// ignored; with no absolute member that is an error.
    pub fn effective_for_range(&self, range: f64) -> Result<f64> {
        let rel = match self.relative {
            Some(r) if range > 0.0 => Some(r * range),
            _ => None,
        };
        let eb = match (self.absolute, rel) {
            (Some(a), Some(r)) => a.min(r),
            (Some(a), None) => a,
            (None, Some(r)) => r,
            (None, None) => return Err(Error::ZeroRangeRelativeBound),
        };
        if eb > 0.0 && eb.is_finite() {
            Ok(eb)
        } else {
            Err(Error::NonPositiveBound(eb))
        }
    }

    pub fn effective_bound(&self, grid: &DataGrid) -> Result<f64> {
        self.effective_for_range(grid.range()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressorConfig {
    /// Prediction layers `n`.
    pub layers: usize,
    /// `m`: the quantizer uses `2^m - 1` intervals and `m`-bit symbols.
    pub interval_exponent: u32,
    pub bound: ErrorBoundSpec,
    /// Hitting rate below which the codec suggests more intervals.
    pub hitting_rate_threshold: f64,
}

impl CompressorConfig {
    pub fn new(bound: ErrorBoundSpec) -> Self {
        Self { layers: 1, interval_exponent: 8, bound, hitting_rate_threshold: 0.9 }
    }

    pub fn with_layers(mut self, layers: usize) -> Self {
        self.layers = layers;
        self
    }

    pub fn with_interval_exponent(mut self, m: u32) -> Self {
        self.interval_exponent = m;
        self
    }

    pub fn with_threshold(mut self, theta: f64) -> Self {
        self.hitting_rate_threshold = theta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_LAYERS).contains(&self.layers) {
            return Err(Error::InvalidLayers(self.layers));
        }
        if !(MIN_INTERVAL_EXPONENT..=MAX_INTERVAL_EXPONENT).contains(&self.interval_exponent) {
            return Err(Error::InvalidIntervalExponent(self.interval_exponent));
        }
        let theta = self.hitting_rate_threshold;
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::InvalidThreshold(theta));
        }
        Ok(())
    }

    /// Number of quantization intervals, `2^m - 1`.
    pub fn interval_count(&self) -> u32 {
        (1u32 << self.interval_exponent) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_bound_takes_minimum() {
        let g = DataGrid::from_f64(vec![3], vec![0.0, 10.0, 5.0]).unwrap();
        assert_eq!(ErrorBoundSpec::absolute(0.5).unwrap().effective_bound(&g).unwrap(), 0.5);
        assert_eq!(ErrorBoundSpec::relative(0.01).unwrap().effective_bound(&g).unwrap(), 0.1);
        assert_eq!(ErrorBoundSpec::both(0.5, 0.01).unwrap().effective_bound(&g).unwrap(), 0.1);
        assert_eq!(ErrorBoundSpec::both(0.05, 0.01).unwrap().effective_bound(&g).unwrap(), 0.05);
    }

    #[test]
    fn adding_a_member_never_increases_bound() {
        for range in [1e-6, 0.3, 1.0, 250.0] {
            for abs in [1e-4, 0.01, 1.0, 10.0] {
                for rel in [1e-5, 1e-3, 0.1] {
                    let both = ErrorBoundSpec::both(abs, rel).unwrap().effective_for_range(range).unwrap();
                    let a = ErrorBoundSpec::absolute(abs).unwrap().effective_for_range(range).unwrap();
                    let r = ErrorBoundSpec::relative(rel).unwrap().effective_for_range(range).unwrap();
                    assert!(both <= a && both <= r);
                }
            }
        }
    }

    #[test]
    fn constant_grid_bounds() {
        let g = DataGrid::from_f64(vec![3], vec![7.0; 3]).unwrap();
        assert_eq!(
            ErrorBoundSpec::relative(1e-3).unwrap().effective_bound(&g),
            Err(Error::ZeroRangeRelativeBound)
        );
        assert_eq!(ErrorBoundSpec::both(0.1, 1e-3).unwrap().effective_bound(&g).unwrap(), 0.1);
        assert_eq!(
            ErrorBoundSpec::absolute(0.0).unwrap().effective_bound(&g),
            Err(Error::NonPositiveBound(0.0))
        );
    }

    #[test]
    fn rejects_malformed_bounds_and_configs() {
        assert_eq!(ErrorBoundSpec::new(None, None), Err(Error::MissingBound));
        assert!(ErrorBoundSpec::absolute(-1.0).is_err());
        assert!(ErrorBoundSpec::relative(f64::NAN).is_err());
        let base = CompressorConfig::new(ErrorBoundSpec::absolute(1.0).unwrap());
        assert!(base.validate().is_ok());
        assert_eq!(base.interval_count(), 255);
        assert_eq!(base.with_layers(0).validate(), Err(Error::InvalidLayers(0)));
        assert_eq!(base.with_interval_exponent(1).validate(), Err(Error::InvalidIntervalExponent(1)));
        assert_eq!(base.with_interval_exponent(17).validate(), Err(Error::InvalidIntervalExponent(17)));
        assert!(base.with_threshold(0.0).validate().is_err());
        assert!(base.with_threshold(1.0).validate().is_ok());
    }
}
