//! MSB-first bit packing.

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    pending: u32,
    len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity_bits(bits: usize) -> Self {
        Self { bytes: Vec::with_capacity(bits.div_ceil(8)), ..Self::default() }
    }

    /// Append the low `count` bits of `value`, most significant first.
    #[inline]
    pub fn write(&mut self, value: u64, count: u32) {
        debug_assert!(count <= 64);
        if count > 32 {
            self.write_small(value >> 32, count - 32);
            self.write_small(value & 0xffff_ffff, 32);
        } else {
            self.write_small(value, count);
        }
    }

    #[inline]
    fn write_small(&mut self, value: u64, count: u32) {
        if count == 0 {
            return;
        }
        let value = value & ((1u64 << count) - 1);
        self.acc = (self.acc << count) | value;
        self.pending += count;
        self.len += count as u64;
        while self.pending >= 8 {
            self.pending -= 8;
            self.bytes.push((self.acc >> self.pending) as u8);
        }
        self.acc &= (1u64 << self.pending) - 1;
    }

    pub fn bit_len(&self) -> u64 {
        self.len
    }

    /// Flush, zero-padding the final byte.
    pub fn finish(mut self) -> (Vec<u8>, u64) {
        if self.pending > 0 {
            self.bytes.push((self.acc << (8 - self.pending)) as u8);
        }
        (self.bytes, self.len)
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
    len: u64,
}

impl<'a> BitReader<'a> {
    /// Reader over the first `len` bits of `bytes`.
    pub fn new(bytes: &'a [u8], len: u64) -> Self {
        debug_assert!(len <= bytes.len() as u64 * 8);
        Self { bytes, pos: 0, len }
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn remaining(&self) -> u64 {
        self.len - self.pos
    }

    /// Next `count` (<= 56) bits without consuming them; bits past the end
    /// read as zero.
    #[inline]
    pub fn peek(&self, count: u32) -> u64 {
        debug_assert!(count <= 56);
        if count == 0 {
            return 0;
        }
        let byte = (self.pos / 8) as usize;
        let shift = (self.pos % 8) as u32;
        let mut word = 0u64;
        if byte + 8 <= self.bytes.len() {
            word = u64::from_be_bytes(self.bytes[byte..byte + 8].try_into().unwrap());
        } else {
            for (i, &b) in self.bytes.get(byte..).unwrap_or(&[]).iter().enumerate() {
                word |= (b as u64) << (56 - 8 * i);
            }
        }
        (word << shift) >> (64 - count)
    }

    /// Next `count` (<= 64) bits, or `None` past the end.
    pub fn read(&mut self, count: u32) -> Option<u64> {
        if count as u64 > self.remaining() {
            return None;
        }
        let v = if count > 32 {
            let hi = self.peek(count - 32);
            self.pos += (count - 32) as u64;
            let lo = self.peek(32);
            self.pos += 32;
            (hi << 32) | lo
        } else {
            let v = self.peek(count);
            self.pos += count as u64;
            v
        };
        Some(v)
    }

    #[inline]
    pub fn skip(&mut self, count: u32) -> bool {
        if count as u64 > self.remaining() {
            return false;
        }
        self.pos += count as u64;
        true
    }
}
