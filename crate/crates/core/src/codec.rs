//! Prediction + quantization + Huffman pipeline.
//!
//! Every point is predicted from the already *reconstructed* values that
//! precede it, so the decompressor can replay the same predictions. Values
//! that fall outside all quantization intervals are stored verbatim.

use std::fmt;

use crate::config::{CompressorConfig, MAX_INTERVAL_EXPONENT};
use crate::container::{CompressedStream, StreamHeader};
use crate::entropy::{self, Decoder};
use crate::error::{Error, Result};
use crate::grid::{values_digest, DataGrid, ElementWidth};
use crate::predictor::Predictor;
use crate::quantizer::{IntervalQuantizer, Quantized, UNPREDICTABLE};

/// Emitted when the hitting rate falls below the configured threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalWarning {
    pub hitting_rate: f64,
    pub threshold: f64,
    pub interval_exponent: u32,
    /// Next exponent worth trying (`m + 2`, capped at 16); `None` when
    /// already at the maximum.
    pub suggested_exponent: Option<u32>,
}

impl fmt::Display for IntervalWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "prediction hitting rate {:.4} is below threshold {:.4} with m = {}",
            self.hitting_rate, self.threshold, self.interval_exponent
        )?;
        match self.suggested_exponent {
            Some(m) => write!(f, "; consider more quantization intervals (m = {m})"),
            None => write!(f, "; already at the maximum interval count"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompressionOutcome {
    pub stream: CompressedStream,
    /// Fraction of points coded with a nonzero quantization code.
    pub hitting_rate: f64,
    pub warning: Option<IntervalWarning>,
    /// [`DataGrid::digest`] of the compressor's reconstruction buffer.
    pub reconstruction_digest: u64,
}

impl CompressionOutcome {
    pub fn predictable_count(&self) -> usize {
        self.stream.header.point_count() - self.stream.unpredictable.len()
    }
}

/// Quantization codes, stored values and reconstruction of one pass.
pub(crate) struct PassResult {
    pub codes: Vec<u32>,
    pub unpredictable: Vec<f64>,
    pub reconstruction: Vec<f64>,
}

pub(crate) fn quantize_pass(
    values: &[f64],
    width: ElementWidth,
    predictor: &Predictor,
    quantizer: &IntervalQuantizer,
) -> PassResult {
    let eb = quantizer.error_bound();
    let mut codes = Vec::with_capacity(values.len());
    let mut unpredictable = Vec::new();
    let mut buffer = vec![0.0; values.len()];
    predictor.scan(&mut buffer, |index, predicted, buffer| {
        let real = values[index];
        let accepted = match quantizer.quantize_unchecked(real, predicted) {
            Quantized::Predictable { code, reconstructed } => {
                let stored = width.round(reconstructed);
                ((real - stored).abs() <= eb).then_some((code, stored))
            }
            Quantized::Unpredictable => None,
        };
        match accepted {
            Some((code, stored)) => {
                codes.push(code);
                buffer[index] = stored;
            }
            None => {
                codes.push(UNPREDICTABLE);
                unpredictable.push(real);
                buffer[index] = real;
            }
        }
    });
    PassResult { codes, unpredictable, reconstruction: buffer }
}

pub fn compress(grid: &DataGrid, config: &CompressorConfig) -> Result<CompressionOutcome> {
    config.validate()?;
    let eb = config.bound.effective_bound(grid)?;
    let m = config.interval_exponent;
    let quantizer = IntervalQuantizer::new(eb, m)?;
    let predictor = Predictor::new(config.layers, grid.dims())?;

    let pass = quantize_pass(grid.values(), grid.width(), &predictor, &quantizer);

    let hist = entropy::histogram(&pass.codes, quantizer.alphabet_size())?;
    let table = entropy::build_code(&hist)?;
    let encoded = entropy::encode(&pass.codes, &table)?;

    let n = grid.len();
    let hitting_rate = (n - pass.unpredictable.len()) as f64 / n as f64;
    let threshold = config.hitting_rate_threshold;
    let warning = (hitting_rate < threshold).then(|| IntervalWarning {
        hitting_rate,
        threshold,
        interval_exponent: m,
        suggested_exponent: (m < MAX_INTERVAL_EXPONENT).then(|| (m + 2).min(MAX_INTERVAL_EXPONENT)),
    });

    let stream = CompressedStream {
        header: StreamHeader {
            width: grid.width(),
            dims: grid.dims().to_vec(),
            interval_exponent: m,
            layers: config.layers,
            error_bound: eb,
        },
        code_lengths: table,
        code_bits: encoded.bytes,
        code_bit_length: encoded.bit_len,
        unpredictable: pass.unpredictable,
    };
    Ok(CompressionOutcome {
        stream,
        hitting_rate,
        warning,
        reconstruction_digest: values_digest(&pass.reconstruction, grid.width()),
    })
}

pub fn decompress(stream: &CompressedStream) -> Result<DataGrid> {
    let header = &stream.header;
    let n = header.point_count();
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    if stream.code_bit_length > stream.code_bits.len() as u64 * 8 {
        return Err(Error::BitsExhausted { decoded: 0, expected: n });
    }
    let quantizer = IntervalQuantizer::new(header.error_bound, header.interval_exponent)?;
    if stream.code_lengths.alphabet_size() != quantizer.alphabet_size() {
        return Err(Error::InvalidCodeLengths);
    }
    let predictor = Predictor::new(header.layers, &header.dims)?;
    let codes = Decoder::new(&stream.code_lengths).decode(&stream.code_bits, stream.code_bit_length, n)?;

    let width = header.width;
    let mut stored = stream.unpredictable.iter();
    let mut underrun = None;
    let mut buffer = vec![0.0; n];
    predictor.scan(&mut buffer, |index, predicted, buffer| {
        let code = codes[index];
        buffer[index] = if code == UNPREDICTABLE {
            match stored.next() {
                Some(&v) => v,
                None => {
                    underrun.get_or_insert(index);
                    0.0
                }
            }
        } else {
            width.round(quantizer.dequantize_unchecked(code, predicted))
        };
    });
    if let Some(index) = underrun {
        return Err(Error::UnpredictableUnderrun(index));
    }
    let left = stored.count();
    if left > 0 {
        return Err(Error::UnpredictableSurplus(left));
    }
    DataGrid::new(header.dims.clone(), buffer, width)
}

pub fn compress_to_bytes(grid: &DataGrid, config: &CompressorConfig) -> Result<Vec<u8>> {
    Ok(compress(grid, config)?.stream.to_bytes())
}

pub fn decompress_bytes(bytes: &[u8]) -> Result<DataGrid> {
    decompress(&CompressedStream::from_bytes(bytes)?)
}
