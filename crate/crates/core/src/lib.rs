//! Error-bounded lossy compression for multidimensional floating-point
//! arrays.
//!
//! Compression walks the grid in scan order (first axis fastest), predicts
//! each point with an `n`-layer stencil over already reconstructed
//! neighbours, quantizes the residual into one of `2^m - 1` intervals of
//! width `2·eb`, and Huffman-codes the interval codes. Points that miss
//! every interval are stored verbatim. Every reconstructed value is within
//! the effective error bound of the original.
//!
//! ```
//! use ebzip::{compress, decompress, CompressorConfig, DataGrid, ErrorBoundSpec};
//!
//! let values: Vec<f64> = (0..64 * 64).map(|i| (i as f64 * 0.01).sin()).collect();
//! let grid = DataGrid::from_f64(vec![64, 64], values).unwrap();
//! let config = CompressorConfig::new(ErrorBoundSpec::relative(1e-4).unwrap());
//! let outcome = compress(&grid, &config).unwrap();
//! let restored = decompress(&outcome.stream).unwrap();
//! let eb = outcome.stream.header.error_bound;
//! assert!(grid.values().iter().zip(restored.values()).all(|(a, b)| (a - b).abs() <= eb));
//! ```

pub mod analysis;
pub mod codec;
pub mod config;
pub mod container;
pub mod entropy;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod predictor;
pub mod quantizer;

pub use codec::{
    compress, compress_to_bytes, decompress, decompress_bytes, CompressionOutcome, IntervalWarning,
};
pub use config::{CompressorConfig, ErrorBoundSpec};
pub use container::{deserialize, serialize, CompressedStream, StreamHeader};
pub use entropy::CodeLengthTable;
pub use error::{Error, FormatError, Result};
pub use grid::{grid_range, DataGrid, ElementWidth};
pub use metrics::{compute_metrics, MetricsReport};
pub use predictor::{build_stencil, predict, Predictor, PredictorStencil};
pub use quantizer::{dequantize, quantize, IntervalQuantizer, Quantized};
