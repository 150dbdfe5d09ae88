//! Canonical Huffman coding over alphabets of arbitrary size.
//!
//! Only code lengths are stored; codes are reassigned in `(length, symbol)`
//! order on both sides. Bits are packed most-significant first.

pub mod bits;

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use bits::{BitReader, BitWriter};

pub const MAX_CODE_LENGTH: u8 = 64;
const LOOKUP_BITS: u8 = 11;

/// Per-symbol code lengths; 0 marks an unused symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeLengthTable {
    lengths: Vec<u8>,
}

impl CodeLengthTable {
    /// Wrap a length array, checking it describes a prefix code.
    pub fn from_lengths(lengths: Vec<u8>) -> Result<Self> {
        if lengths.iter().any(|&l| l > MAX_CODE_LENGTH) {
            return Err(Error::InvalidCodeLengths);
        }
        // Kraft sum scaled by 2^64, in u128 to absorb the single 2^64 term.
        let mut kraft: u128 = 0;
        for &l in lengths.iter().filter(|&&l| l > 0) {
            kraft += 1u128 << (64 - l as u32);
        }
        if kraft > 1u128 << 64 {
            return Err(Error::InvalidCodeLengths);
        }
        Ok(Self { lengths })
    }

    pub fn lengths(&self) -> &[u8] {
        &self.lengths
    }

    pub fn alphabet_size(&self) -> usize {
        self.lengths.len()
    }

    pub fn length(&self, symbol: u32) -> u8 {
        self.lengths.get(symbol as usize).copied().unwrap_or(0)
    }

    pub fn used_symbols(&self) -> usize {
        self.lengths.iter().filter(|&&l| l > 0).count()
    }

    pub fn max_length(&self) -> u8 {
        self.lengths.iter().copied().max().unwrap_or(0)
    }

    /// `sum 2^-len` over used symbols.
    pub fn kraft_sum(&self) -> f64 {
        self.lengths.iter().filter(|&&l| l > 0).map(|&l| 0.5f64.powi(l as i32)).sum()
    }

    /// Total encoded bits for a histogram under this table.
    pub fn encoded_bits(&self, histogram: &[u64]) -> u128 {
        histogram.iter().zip(&self.lengths).map(|(&c, &l)| c as u128 * l as u128).sum()
    }

    /// Canonical codeword for each symbol (0 for unused ones).
    pub fn codes(&self) -> Vec<u64> {
        let max = self.max_length() as usize;
        let mut count = vec![0u128; max + 1];
        for &l in self.lengths.iter().filter(|&&l| l > 0) {
            count[l as usize] += 1;
        }
        let mut next = vec![0u128; max + 1];
        let mut code = 0u128;
        for len in 1..=max {
            code = (code + count[len - 1]) << 1;
            next[len] = code;
        }
        self.lengths
            .iter()
            .map(|&l| {
                if l == 0 {
                    0
                } else {
                    let c = next[l as usize];
                    next[l as usize] += 1;
                    c as u64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    parent: usize,
}

fn huffman_depths(weights: &[(u32, u128)]) -> Vec<u32> {
    // weights: (symbol, count), count > 0, at least two entries
    let leaves = weights.len();
    let mut nodes: Vec<Node> = Vec::with_capacity(2 * leaves);
    let mut heap = BinaryHeap::with_capacity(leaves);
    for (i, &(sym, w)) in weights.iter().enumerate() {
        nodes.push(Node { parent: usize::MAX });
        heap.push(Reverse((w, sym, i)));
    }
    while heap.len() > 1 {
        let Reverse((w1, s1, a)) = heap.pop().unwrap();
        let Reverse((w2, s2, b)) = heap.pop().unwrap();
        let id = nodes.len();
        nodes.push(Node { parent: usize::MAX });
        nodes[a].parent = id;
        nodes[b].parent = id;
        // an internal node sorts by the smallest symbol beneath it
        heap.push(Reverse((w1 + w2, s1.min(s2), id)));
    }
    let mut depth = vec![0u32; nodes.len()];
    for id in (0..nodes.len()).rev() {
        let p = nodes[id].parent;
        if p != usize::MAX {
            depth[id] = depth[p] + 1;
        }
    }
    depth.truncate(leaves);
    depth
}

/// Optimal prefix-code lengths for `histogram` (indexed by symbol).
///
/// Ties are broken by `(count, symbol)`. A single used symbol gets length 1.
/// If the optimal tree is deeper than 64 the counts are halved (keeping
/// them nonzero) until it fits.
pub fn build_code(histogram: &[u64]) -> Result<CodeLengthTable> {
    let mut weights: Vec<(u32, u128)> =
        histogram.iter().enumerate().filter(|(_, &c)| c > 0).map(|(s, &c)| (s as u32, c as u128)).collect();
    let mut lengths = vec![0u8; histogram.len()];
    match weights.len() {
        0 => return Err(Error::EmptyHistogram),
        1 => {
            lengths[weights[0].0 as usize] = 1;
            return CodeLengthTable::from_lengths(lengths);
        }
        _ => {}
    }
    loop {
        let depths = huffman_depths(&weights);
        if depths.iter().all(|&d| d <= MAX_CODE_LENGTH as u32) {
            for (&(sym, _), &d) in weights.iter().zip(&depths) {
                lengths[sym as usize] = d as u8;
            }
            return CodeLengthTable::from_lengths(lengths);
        }
        for w in &mut weights {
            w.1 = (w.1 / 2).max(1);
        }
    }
}

/// Count symbol occurrences over an alphabet of `alphabet` symbols.
pub fn histogram(symbols: &[u32], alphabet: usize) -> Result<Vec<u64>> {
    let mut hist = vec![0u64; alphabet];
    for &s in symbols {
        *hist.get_mut(s as usize).ok_or(Error::UnknownSymbol(s))? += 1;
    }
    Ok(hist)
}

/// Bit-packed output of [`encode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedBits {
    pub bytes: Vec<u8>,
    pub bit_len: u64,
}

pub fn encode(symbols: &[u32], table: &CodeLengthTable) -> Result<EncodedBits> {
    let codes = table.codes();
    let lengths = table.lengths();
    let mut writer = BitWriter::with_capacity_bits(symbols.len() * 2);
    for &s in symbols {
        let len = lengths.get(s as usize).copied().unwrap_or(0);
        if len == 0 {
            return Err(Error::UnknownSymbol(s));
        }
        writer.write(codes[s as usize], len as u32);
    }
    let (bytes, bit_len) = writer.finish();
    Ok(EncodedBits { bytes, bit_len })
}

/// Table-driven canonical decoder.
#[derive(Debug, Clone)]
pub struct Decoder {
    lookup_bits: u8,
    // (symbol, length); length 0 means the code is longer than lookup_bits
    lookup: Vec<(u32, u8)>,
    max_len: u8,
    first_code: Vec<u64>,
    first_index: Vec<usize>,
    count: Vec<u64>,
    sorted: Vec<u32>,
}

impl Decoder {
    pub fn new(table: &CodeLengthTable) -> Self {
        let max_len = table.max_length();
        let mut count = vec![0u64; max_len as usize + 1];
        for &l in table.lengths().iter().filter(|&&l| l > 0) {
            count[l as usize] += 1;
        }
        let mut sorted: Vec<u32> =
            (0..table.alphabet_size() as u32).filter(|&s| table.length(s) > 0).collect();
        sorted.sort_by_key(|&s| (table.length(s), s));

        let codes = table.codes();
        let mut first_code = vec![0u64; max_len as usize + 1];
        let mut first_index = vec![0usize; max_len as usize + 1];
        let mut idx = 0usize;
        for len in 1..=max_len as usize {
            first_index[len] = idx;
            if count[len] > 0 {
                first_code[len] = codes[sorted[idx] as usize];
            }
            idx += count[len] as usize;
        }

        let lookup_bits = LOOKUP_BITS.min(max_len);
        let mut lookup = vec![(0u32, 0u8); 1usize << lookup_bits];
        for &s in &sorted {
            let len = table.length(s);
            if len > lookup_bits {
                break;
            }
            let shift = lookup_bits - len;
            let base = (codes[s as usize] << shift) as usize;
            for entry in &mut lookup[base..base + (1usize << shift)] {
                *entry = (s, len);
            }
        }
        Self { lookup_bits, lookup, max_len, first_code, first_index, count, sorted }
    }

    #[inline]
    fn next(&self, reader: &mut BitReader<'_>, decoded: usize, expected: usize) -> Result<u32> {
        let (sym, len) = self.lookup[reader.peek(self.lookup_bits as u32) as usize];
        if len > 0 {
            if !reader.skip(len as u32) {
                return Err(Error::BitsExhausted { decoded, expected });
            }
            return Ok(sym);
        }
        for len in (self.lookup_bits + 1)..=self.max_len {
            let l = len as usize;
            let code = if len <= 56 {
                reader.peek(len as u32)
            } else {
                let mut probe = reader.clone();
                match probe.read(len as u32) {
                    Some(v) => v,
                    None => break,
                }
            };
            let rel = code.wrapping_sub(self.first_code[l]);
            if rel < self.count[l] {
                if !reader.skip(len as u32) {
                    return Err(Error::BitsExhausted { decoded, expected });
                }
                return Ok(self.sorted[self.first_index[l] + rel as usize]);
            }
        }
        if reader.remaining() < self.max_len as u64 {
            Err(Error::BitsExhausted { decoded, expected })
        } else {
            Err(Error::InvalidPrefix(reader.position()))
        }
    }

    /// Decode exactly `count` symbols from the first `bit_len` bits.
    pub fn decode(&self, bytes: &[u8], bit_len: u64, count: usize) -> Result<Vec<u32>> {
        if bit_len > bytes.len() as u64 * 8 {
            return Err(Error::BitsExhausted { decoded: 0, expected: count });
        }
        let mut reader = BitReader::new(bytes, bit_len);
        let mut out = Vec::with_capacity(count);
        if count > 0 && self.sorted.is_empty() {
            return Err(Error::InvalidCodeLengths);
        }
        for i in 0..count {
            out.push(self.next(&mut reader, i, count)?);
        }
        Ok(out)
    }
}

pub fn decode(bytes: &[u8], bit_len: u64, table: &CodeLengthTable, count: usize) -> Result<Vec<u32>> {
    Decoder::new(table).decode(bytes, bit_len, count)
}
