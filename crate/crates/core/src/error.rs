use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid is empty")]
    EmptyGrid,
    #[error("unsupported dimensionality {0} (expected 1..=4)")]
    UnsupportedDimensionality(usize),
    #[error("dimension sizes must be positive, got {0:?}")]
    ZeroDimension(Vec<usize>),
    #[error("value count {actual} does not match product of dims {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("grid dimensions differ: {0:?} vs {1:?}")]
    DimsMismatch(Vec<usize>, Vec<usize>),

    #[error("no error bound given")]
    MissingBound,
    #[error("error bound must be finite and nonnegative, got {0}")]
    InvalidBound(f64),
    #[error("relative bound on a constant grid yields a zero error bound")]
    ZeroRangeRelativeBound,
    #[error("effective error bound must be positive, got {0}")]
    NonPositiveBound(f64),
    #[error("layer count {0} out of range (expected 1..=8)")]
    InvalidLayers(usize),
    #[error("interval exponent {0} out of range (expected 2..=16)")]
    InvalidIntervalExponent(u32),
    #[error("hitting-rate threshold {0} out of range (expected (0, 1])")]
    InvalidThreshold(f64),

    #[error("quantization input is not finite")]
    NonFiniteQuantizerInput,
    #[error("code {code} is not a valid predictable code for m = {m}")]
    InvalidCode { code: u32, m: u32 },

    #[error("histogram has no nonzero counts")]
    EmptyHistogram,
    #[error("symbol {0} has no code in the table")]
    UnknownSymbol(u32),
    #[error("bit stream exhausted after {decoded} of {expected} symbols")]
    BitsExhausted { decoded: usize, expected: usize },
    #[error("invalid prefix in bit stream at bit {0}")]
    InvalidPrefix(u64),
    #[error("code-length table is not a valid prefix code")]
    InvalidCodeLengths,

    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("unpredictable-value block exhausted at point {0}")]
    UnpredictableUnderrun(usize),
    #[error("{0} unpredictable values left unused after decoding")]
    UnpredictableSurplus(usize),

    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("{0}")]
    InvalidArgument(String),
}

/// Container parsing failures.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),
    #[error("invalid element width flag {0}")]
    InvalidWidthFlag(u8),
    #[error("invalid field: {0}")]
    Invalid(&'static str),
    #[error("header declares zero data points")]
    EmptyGrid,
    #[error("truncated payload: needed {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("{what} mismatch: header implies {expected}, found {actual}")]
    CountMismatch { what: &'static str, expected: u64, actual: u64 },
}
