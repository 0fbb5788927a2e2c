use std::fmt;

use super::CodecError;

/// Append-only bit sequence, packed most-significant-bit first.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct BitStream {
    bytes: Vec<u8>,
    len: usize,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wraps packed bytes; every bit of every byte counts.
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let len = bytes.len() * 8;
        BitStream { bytes, len }
    }

    /// Parses a string of `0`/`1` characters; whitespace is ignored.
    pub fn from_bitstring(s: &str) -> Option<Self> {
        let mut out = BitStream::new();
        for c in s.chars().filter(|c| !c.is_whitespace()) {
            match c {
                '0' => out.push_bit(false),
                '1' => out.push_bit(true),
                _ => return None,
            }
        }
        Some(out)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Appends the low `n` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, n: u32) {
        debug_assert!(n <= 64);
        for i in (0..n).rev() {
            self.push_bit((value >> i) & 1 == 1);
        }
    }

    pub fn append(&mut self, other: &BitStream) {
        for i in 0..other.len {
            self.push_bit(other.bit(i));
        }
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    /// Packed bytes; the last byte is zero-padded on the right.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    /// Drops everything past the first `len` bits.
    pub fn truncate(&mut self, len: usize) {
        if len >= self.len {
            return;
        }
        self.bytes.truncate(len.div_ceil(8));
        if !len.is_multiple_of(8) {
            let last = self.bytes.len() - 1;
            self.bytes[last] &= 0xFF << (8 - len % 8);
        }
        self.len = len;
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader {
            bytes: &self.bytes,
            len: self.len,
            pos: 0,
        }
    }

    pub fn to_bitstring(&self) -> String {
        (0..self.len).map(|i| if self.bit(i) { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitStream({})", self.to_bitstring())
    }
}

/// Read cursor over packed bits.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    len: usize,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn from_bytes(bytes: &'a [u8]) -> Self {
        BitReader {
            bytes,
            len: bytes.len() * 8,
            pos: 0,
        }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.len - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool, CodecError> {
        if self.pos >= self.len {
            return Err(CodecError::Truncated { at: self.pos });
        }
        let bit = self.bytes[self.pos / 8] & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, n: u32) -> Result<u64, CodecError> {
        debug_assert!(n <= 64);
        if self.remaining() < n as usize {
            return Err(CodecError::Truncated { at: self.len });
        }
        let mut v = 0u64;
        for _ in 0..n {
            v = (v << 1) | u64::from(self.read_bit()?);
        }
        Ok(v)
    }

    /// Reads `n` bits without moving the cursor; `None` if fewer remain.
    pub fn peek_bits(&self, n: u32) -> Option<u64> {
        let mut copy = self.clone();
        copy.read_bits(n).ok()
    }
}
