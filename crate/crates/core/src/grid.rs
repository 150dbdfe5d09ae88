//! Multidimensional floating-point arrays.
//!
//! Values are kept as `f64` regardless of the declared element width. A grid
//! declared as 32-bit only ever holds values exactly representable as `f32`.
//! Scan order is row-major with `dims[0]` varying fastest.

use crate::error::{Error, FormatError, Result};

pub const MAX_DIMS: usize = 4;

/// Storage width of the grid elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementWidth {
    F32,
    F64,
}

impl ElementWidth {
    pub const fn bytes(self) -> usize {
        match self {
            ElementWidth::F32 => 4,
            ElementWidth::F64 => 8,
        }
    }

    pub const fn bits(self) -> u32 {
        self.bytes() as u32 * 8
    }

    /// Container flag: 0 = 32-bit, 1 = 64-bit.
    pub const fn flag(self) -> u8 {
        match self {
            ElementWidth::F32 => 0,
            ElementWidth::F64 => 1,
        }
    }

    pub fn from_flag(flag: u8) -> Result<Self, FormatError> {
        match flag {
            0 => Ok(ElementWidth::F32),
            1 => Ok(ElementWidth::F64),
            other => Err(FormatError::InvalidWidthFlag(other)),
        }
    }

    pub fn from_bits(bits: u32) -> Option<Self> {
        match bits {
            32 => Some(ElementWidth::F32),
            64 => Some(ElementWidth::F64),
            _ => None,
        }
    }

    /// Round `value` to the nearest value representable at this width.
    #[inline]
    pub fn round(self, value: f64) -> f64 {
        match self {
            ElementWidth::F32 => value as f32 as f64,
            ElementWidth::F64 => value,
        }
    }

    pub(crate) fn write_le(self, value: f64, out: &mut Vec<u8>) {
        match self {
            ElementWidth::F32 => out.extend_from_slice(&(value as f32).to_le_bytes()),
            ElementWidth::F64 => out.extend_from_slice(&value.to_le_bytes()),
        }
    }

    pub(crate) fn read_le(self, bytes: &[u8]) -> f64 {
        match self {
            ElementWidth::F32 => f32::from_le_bytes(bytes[..4].try_into().unwrap()) as f64,
            ElementWidth::F64 => f64::from_le_bytes(bytes[..8].try_into().unwrap()),
        }
    }

    pub(crate) fn bit_pattern(self, value: f64) -> u64 {
        match self {
            ElementWidth::F32 => (value as f32).to_bits() as u64,
            ElementWidth::F64 => value.to_bits(),
        }
    }
}

/// Validate a dimension list and return the point count.
pub fn checked_len(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.len() > MAX_DIMS {
        return Err(Error::UnsupportedDimensionality(dims.len()));
    }
    if dims.contains(&0) {
        return Err(Error::ZeroDimension(dims.to_vec()));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::InvalidArgument(format!("dims {dims:?} overflow usize")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataGrid {
    dims: Vec<usize>,
    values: Vec<f64>,
    width: ElementWidth,
}

impl DataGrid {
    /// Build a grid, rounding values to `width`.
    ///
    /// Rejects NaN and infinities, including values that overflow when
    /// rounded to 32 bits.
    pub fn new(dims: Vec<usize>, mut values: Vec<f64>, width: ElementWidth) -> Result<Self> {
        let len = checked_len(&dims)?;
        if values.len() != len {
            return Err(Error::LengthMismatch { expected: len, actual: values.len() });
        }
        for (index, v) in values.iter_mut().enumerate() {
            *v = width.round(*v);
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(Self { dims, values, width })
    }

    pub fn from_f32(dims: Vec<usize>, values: &[f32]) -> Result<Self> {
        Self::new(dims, values.iter().map(|&v| v as f64).collect(), ElementWidth::F32)
    }

    pub fn from_f64(dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        Self::new(dims, values, ElementWidth::F64)
    }

    /// Parse a headerless little-endian dump.
    pub fn from_le_bytes(dims: Vec<usize>, width: ElementWidth, bytes: &[u8]) -> Result<Self> {
        let len = checked_len(&dims)?;
        let expected = len * width.bytes();
        if bytes.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: bytes.len() });
        }
        let values = bytes.chunks_exact(width.bytes()).map(|c| width.read_le(c)).collect();
        Self::new(dims, values, width)
    }

    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.byte_size());
        for &v in &self.values {
            self.width.write_le(v, &mut out);
        }
        out
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn width(&self) -> ElementWidth {
        self.width
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Uncompressed size in bytes.
    pub fn byte_size(&self) -> usize {
        self.values.len() * self.width.bytes()
    }

    pub fn min_max(&self) -> Option<(f64, f64)> {
        let first = *self.values.first()?;
        Some(self.values.iter().fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v))))
    }

    /// Value range `max - min`.
    pub fn range(&self) -> Result<f64> {
        grid_range(self)
    }

    /// FNV-1a hash over the element-width bit patterns of every value.
    ///
    /// Two grids with equal digests and equal dims are bit-identical with
    /// overwhelming probability; the codec reports the digest of its
    /// reconstruction buffer so the decompressor can be checked against it.
    pub fn digest(&self) -> u64 {
        values_digest(&self.values, self.width)
    }
}

pub(crate) fn values_digest(values: &[f64], width: ElementWidth) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for &v in values {
        for b in width.bit_pattern(v).to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    }
    h
}

pub fn grid_range(grid: &DataGrid) -> Result<f64> {
    let (lo, hi) = grid.min_max().ok_or(Error::EmptyGrid)?;
    Ok(hi - lo)
}
