//! Error-controlled uniform quantization around a predicted value.
//!
//! With interval exponent `m` there are `2^m - 1` intervals of width `2·eb`
//! centred on `predicted + k·2·eb` for `|k| <= 2^{m-1} - 1`. Interval `k`
//! is coded as `2^{m-1} + k`; code 0 marks a value outside every interval.

use crate::error::{Error, Result};

pub const UNPREDICTABLE: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantized {
    Predictable { code: u32, reconstructed: f64 },
    Unpredictable,
}

impl Quantized {
    pub fn code(&self) -> u32 {
        match *self {
            Quantized::Predictable { code, .. } => code,
            Quantized::Unpredictable => UNPREDICTABLE,
        }
    }
}

/// Quantizer for a fixed `(eb, m)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalQuantizer {
    eb: f64,
    interval: f64,
    m: u32,
    center: u32,
    max_k: f64,
}

impl IntervalQuantizer {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(eb: f64, m: u32) -> Result<Self> {
        if !(eb > 0.0) || !eb.is_finite() {
            return Err(Error::NonPositiveBound(eb));
        }
        if !(1..=31).contains(&m) {
            return Err(Error::InvalidIntervalExponent(m));
        }
        let center = 1u32 << (m - 1);
        Ok(Self { eb, interval: 2.0 * eb, m, center, max_k: (center - 1) as f64 })
    }

    pub fn error_bound(&self) -> f64 {
        self.eb
    }

    pub fn exponent(&self) -> u32 {
        self.m
    }

    /// Code of the zero-offset interval, `2^{m-1}`.
    pub fn center_code(&self) -> u32 {
        self.center
    }

    pub fn alphabet_size(&self) -> usize {
        1usize << self.m
    }

    /// Quantize without input validation. Non-finite differences come back
    /// as unpredictable, as does any reconstruction that misses the bound
    /// after floating-point rounding.
    #[inline]
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn quantize_unchecked(&self, real: f64, predicted: f64) -> Quantized {
        let k = ((real - predicted) / self.interval).round();
        // also rejects NaN
        if !(k.abs() <= self.max_k) {
            return Quantized::Unpredictable;
        }
        let reconstructed = predicted + k * self.interval;
        if (real - reconstructed).abs() <= self.eb {
            Quantized::Predictable { code: (self.center as i64 + k as i64) as u32, reconstructed }
        } else {
            Quantized::Unpredictable
        }
    }

    pub fn quantize(&self, real: f64, predicted: f64) -> Result<Quantized> {
        if !real.is_finite() || !predicted.is_finite() {
            return Err(Error::NonFiniteQuantizerInput);
        }
        Ok(self.quantize_unchecked(real, predicted))
    }

    #[inline]
    pub fn dequantize_unchecked(&self, code: u32, predicted: f64) -> f64 {
        predicted + (code as i64 - self.center as i64) as f64 * self.interval
    }

    pub fn dequantize(&self, code: u32, predicted: f64) -> Result<f64> {
        if code == UNPREDICTABLE || code >= (1u32 << self.m) {
            return Err(Error::InvalidCode { code, m: self.m });
        }
        Ok(self.dequantize_unchecked(code, predicted))
    }
}

pub fn quantize(real: f64, predicted: f64, eb: f64, m: u32) -> Result<Quantized> {
    IntervalQuantizer::new(eb, m)?.quantize(real, predicted)
}

pub fn dequantize(code: u32, predicted: f64, eb: f64, m: u32) -> Result<f64> {
    IntervalQuantizer::new(eb, m)?.dequantize(code, predicted)
}
