//! Variable-length byte codes for non-negative integers.
//!
//! Variant A spends one flag bit in the first byte and has codeword lengths
//! 1 and `b`. Variant B spends two flag bits and has lengths 1, 2 and `b`.
//! Flag bits are the most significant bits of the first byte and payloads are
//! big-endian, so the codeword class is visible from the first byte alone.
//!
//! | variant | first byte | length | payload bits |
//! |---------|------------|--------|--------------|
//! | A       | `0xxxxxxx` | 1      | 7            |
//! | A       | `1xxxxxxx` | b      | 8b - 1       |
//! | B       | `00xxxxxx` | 1      | 6            |
//! | B       | `01xxxxxx` | 2      | 14           |
//! | B       | `10xxxxxx` | b      | 8b - 2       |
//!
//! The B prefix `11` is never emitted and is rejected when decoding.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CodeVariant {
    /// Lengths 1 and `b`.
    A,
    /// Lengths 1, 2 and `b`.
    B,
}

impl CodeVariant {
    fn min_width(self) -> u8 {
        match self {
            CodeVariant::A => 2,
            CodeVariant::B => 3,
        }
    }

    fn flag_bits(self) -> u32 {
        match self {
            CodeVariant::A => 1,
            CodeVariant::B => 2,
        }
    }
}

/// Maximum codeword width; a wider payload would not fit a `u64`.
pub const MAX_WIDTH: u8 = 8;

/// Smallest `b` whose long codeword can hold `max_value`, clamped to the
/// variant's minimum. May exceed [`MAX_WIDTH`].
pub fn compute_b(max_value: u64, variant: CodeVariant) -> u8 {
    let needed = 64 - max_value.leading_zeros();
    let flag = variant.flag_bits();
    let b = (needed + flag).div_ceil(8) as u8;
    b.max(variant.min_width())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ByteCode {
    variant: CodeVariant,
    width: u8,
}

impl ByteCode {
    pub fn new(variant: CodeVariant, width: u8) -> Result<Self> {
        if width < variant.min_width() || width > MAX_WIDTH {
            return Err(Error::InvalidWidth { variant, width });
        }
        Ok(ByteCode { variant, width })
    }

    /// The narrowest code of `variant` that can encode every value up to
    /// `max_value`.
    pub fn for_max_value(max_value: u64, variant: CodeVariant) -> Result<Self> {
        Self::new(variant, compute_b(max_value, variant))
    }

    pub fn variant(&self) -> CodeVariant {
        self.variant
    }

    /// The codeword width `b` of the longest class.
    pub fn width(&self) -> u8 {
        self.width
    }

    fn long_payload_bits(&self) -> u32 {
        8 * u32::from(self.width) - self.variant.flag_bits()
    }

    pub fn max_value(&self) -> u64 {
        u64::MAX >> (64 - self.long_payload_bits())
    }

    /// Length of the codeword for `v`, or `None` when `v` is out of range.
    pub fn codeword_len(&self, v: u64) -> Option<usize> {
        if v > self.max_value() {
            return None;
        }
        Some(match self.variant {
            CodeVariant::A if v < 1 << 7 => 1,
            CodeVariant::B if v < 1 << 6 => 1,
            CodeVariant::B if v < 1 << 14 => 2,
            _ => self.width as usize,
        })
    }

    /// Appends the codeword for `v` to `out` and returns its length.
    pub fn encode(&self, v: u64, out: &mut Vec<u8>) -> Result<usize> {
        let len = self.codeword_len(v).ok_or(Error::ValueOutOfRange {
            value: v,
            variant: self.variant,
            width: self.width,
        })?;
        let prefix: u8 = match (self.variant, len) {
            (_, 1) => 0x00,
            (CodeVariant::B, 2) => 0x40,
            _ => 0x80,
        };
        let bytes = v.to_be_bytes();
        let start = bytes.len() - len;
        out.push(prefix | bytes[start]);
        out.extend_from_slice(&bytes[start + 1..]);
        Ok(len)
    }

    /// Decodes one codeword from the front of `input`, returning the value
    /// and the number of bytes consumed.
    #[inline]
    pub fn decode(&self, input: &[u8]) -> Result<(u64, usize)> {
        let &first = input.first().ok_or(Error::Truncated("empty codeword"))?;
        let (len, head) = match self.variant {
            CodeVariant::A if first & 0x80 == 0 => return Ok((u64::from(first), 1)),
            CodeVariant::A => (self.width as usize, first & 0x7F),
            CodeVariant::B => match first >> 6 {
                0b00 => return Ok((u64::from(first), 1)),
                0b01 => (2, first & 0x3F),
                0b10 => (self.width as usize, first & 0x3F),
                _ => return Err(Error::corrupt("byte-code prefix 11")),
            },
        };
        let tail = input
            .get(1..len)
            .ok_or(Error::Truncated("codeword shorter than its length class"))?;
        let v = tail
            .iter()
            .fold(u64::from(head), |acc, &byte| (acc << 8) | u64::from(byte));
        Ok((v, len))
    }
}

/// Sequential decoder over a byte slice.
#[derive(Debug, Clone)]
pub struct CodeReader<'a> {
    code: ByteCode,
    input: &'a [u8],
    pos: usize,
}

impl<'a> CodeReader<'a> {
    pub fn new(code: ByteCode, input: &'a [u8]) -> Self {
        CodeReader {
            code,
            input,
            pos: 0,
        }
    }

    #[inline]
    pub fn next_value(&mut self) -> Result<u64> {
        let (v, len) = self.code.decode(&self.input[self.pos..])?;
        self.pos += len;
        Ok(v)
    }

    /// Bytes consumed so far.
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> &'a [u8] {
        &self.input[self.pos..]
    }

    pub fn is_empty(&self) -> bool {
        self.pos >= self.input.len()
    }
}
