//! Self-describing compressed container.
//!
//! Layout, all integers and floats little-endian:
//!
//! | offset      | size      | field                                  |
//! |-------------|-----------|----------------------------------------|
//! | 0           | 4         | magic `EBZ1`                           |
//! | 4           | 1         | version (1)                            |
//! | 5           | 1         | element width (0 = f32, 1 = f64)       |
//! | 6           | 1         | `d`                                    |
//! | 7           | 1         | `m`                                    |
//! | 8           | 1         | layers `n`                             |
//! | 9           | 3         | reserved, zero                         |
//! | 12          | 8·d       | dims, `u64` each, fastest axis first   |
//! | 12+8d       | 8         | effective error bound, `f64`           |
//! | 20+8d       | 8         | unpredictable count, `u64`             |
//! | 28+8d       | 8         | code bit length, `u64`                 |
//! | 36+8d       | 2^m       | Huffman code lengths, one byte each    |
//! | ..          | ⌈bits/8⌉  | Huffman-coded quantization codes       |
//! | ..          | w·count   | unpredictable values, raw IEEE-754     |

use crate::config::{MAX_INTERVAL_EXPONENT, MAX_LAYERS, MIN_INTERVAL_EXPONENT};
use crate::entropy::CodeLengthTable;
use crate::error::{FormatError, Result};
use crate::grid::{ElementWidth, MAX_DIMS};

pub const MAGIC: [u8; 4] = *b"EBZ1";
pub const VERSION: u8 = 1;
const FIXED_PREFIX: usize = 12;

/// Bytes occupied by the fixed header for a `d`-dimensional grid,
/// excluding the code-length table.
pub const fn header_size(ndim: usize) -> usize {
    FIXED_PREFIX + 8 * ndim + 24
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamHeader {
    pub width: ElementWidth,
    pub dims: Vec<usize>,
    pub interval_exponent: u32,
    pub layers: usize,
    pub error_bound: f64,
}

impl StreamHeader {
    pub fn point_count(&self) -> usize {
        self.dims.iter().product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressedStream {
    pub header: StreamHeader,
    pub code_lengths: CodeLengthTable,
    pub code_bits: Vec<u8>,
    pub code_bit_length: u64,
    /// Values stored verbatim, in scan order of occurrence.
    pub unpredictable: Vec<f64>,
}

impl CompressedStream {
    /// Exact size of [`serialize`]'s output.
    pub fn byte_size(&self) -> usize {
        header_size(self.header.dims.len())
            + self.code_lengths.alphabet_size()
            + self.code_bit_length.div_ceil(8) as usize
            + self.unpredictable.len() * self.header.width.bytes()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        serialize(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        deserialize(bytes)
    }
}

pub fn serialize(stream: &CompressedStream) -> Vec<u8> {
    let h = &stream.header;
    let mut out = Vec::with_capacity(stream.byte_size());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(h.width.flag());
    out.push(h.dims.len() as u8);
    out.push(h.interval_exponent as u8);
    out.push(h.layers as u8);
    out.extend_from_slice(&[0; 3]);
    for &d in &h.dims {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    out.extend_from_slice(&h.error_bound.to_le_bytes());
    out.extend_from_slice(&(stream.unpredictable.len() as u64).to_le_bytes());
    out.extend_from_slice(&stream.code_bit_length.to_le_bytes());
    out.extend_from_slice(stream.code_lengths.lengths());
    let code_bytes = stream.code_bit_length.div_ceil(8) as usize;
    out.extend_from_slice(&stream.code_bits[..code_bytes]);
    for &v in &stream.unpredictable {
        h.width.write_le(v, &mut out);
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        let end =
            self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or(FormatError::Truncated {
                needed: self.pos.saturating_add(n),
                available: self.bytes.len(),
            })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn deserialize(bytes: &[u8]) -> Result<CompressedStream, FormatError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic: [u8; 4] = cur.take(4)?.try_into().unwrap();
    if magic != MAGIC {
        return Err(FormatError::BadMagic(magic));
    }
    let version = cur.u8()?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let width = ElementWidth::from_flag(cur.u8()?)?;
    let ndim = cur.u8()? as usize;
    if !(1..=MAX_DIMS).contains(&ndim) {
        return Err(FormatError::Invalid("dimensionality"));
    }
    let m = cur.u8()? as u32;
    if !(MIN_INTERVAL_EXPONENT..=MAX_INTERVAL_EXPONENT).contains(&m) {
        return Err(FormatError::Invalid("interval exponent"));
    }
    let layers = cur.u8()? as usize;
    if !(1..=MAX_LAYERS).contains(&layers) {
        return Err(FormatError::Invalid("layer count"));
    }
    if cur.take(3)? != [0, 0, 0] {
        return Err(FormatError::Invalid("reserved bytes"));
    }
    let mut dims = Vec::with_capacity(ndim);
    let mut points: u64 = 1;
    for _ in 0..ndim {
        let d = cur.u64()?;
        points = points.checked_mul(d).ok_or(FormatError::Invalid("dims overflow"))?;
        dims.push(usize::try_from(d).map_err(|_| FormatError::Invalid("dims overflow"))?);
    }
    if points == 0 {
        return Err(FormatError::EmptyGrid);
    }
    usize::try_from(points).map_err(|_| FormatError::Invalid("dims overflow"))?;
    let error_bound = f64::from_le_bytes(cur.take(8)?.try_into().unwrap());
    if !(error_bound > 0.0 && error_bound.is_finite()) {
        return Err(FormatError::Invalid("error bound"));
    }
    let n_unpredictable = cur.u64()?;
    if n_unpredictable > points {
        return Err(FormatError::CountMismatch {
            what: "unpredictable count",
            expected: points,
            actual: n_unpredictable,
        });
    }
    let code_bit_length = cur.u64()?;
    // every code occupies between 1 and 64 bits
    if code_bit_length < points || code_bit_length / 64 > points {
        return Err(FormatError::CountMismatch {
            what: "code bit length",
            expected: points,
            actual: code_bit_length,
        });
    }
    let table = cur.take(1usize << m)?.to_vec();
    let code_lengths =
        CodeLengthTable::from_lengths(table).map_err(|_| FormatError::Invalid("code lengths"))?;
    if code_lengths.used_symbols() == 0 {
        return Err(FormatError::Invalid("code lengths"));
    }

    let code_bytes = code_bit_length.div_ceil(8) as usize;
    let value_bytes = n_unpredictable as usize * width.bytes();
    let expected = cur.pos + code_bytes + value_bytes;
    if bytes.len() < expected {
        return Err(FormatError::Truncated { needed: expected, available: bytes.len() });
    }
    if bytes.len() > expected {
        return Err(FormatError::CountMismatch {
            what: "container length",
            expected: expected as u64,
            actual: bytes.len() as u64,
        });
    }
    let code_bits = cur.take(code_bytes)?.to_vec();
    let unpredictable: Vec<f64> =
        cur.take(value_bytes)?.chunks_exact(width.bytes()).map(|c| width.read_le(c)).collect();
    if unpredictable.iter().any(|v| !v.is_finite()) {
        return Err(FormatError::Invalid("non-finite stored value"));
    }
    Ok(CompressedStream {
        header: StreamHeader { width, dims, interval_exponent: m, layers, error_bound },
        code_lengths,
        code_bits,
        code_bit_length,
        unpredictable,
    })
}
