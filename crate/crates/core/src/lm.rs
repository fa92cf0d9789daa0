//! Codec based on list merging.
//!
//! Lines are grouped into blocks of exactly `h` lines (the last block is
//! padded with empty lines). A block becomes one sorted, duplicate-free long
//! list plus an `h`-bit membership window per long-list value: bit `r` of
//! window `j` is set when value `j` belongs to line `r` of the block.
//!
//! Plaintext block layout: the long list as byte-coded tokens (first value
//! plus one, then the gaps, then `0`), followed by the windows. Windows are
//! concatenated value-major, most significant bit first. The bitmap variant
//! stores that bitstream raw. The diff variant stores one byte per set bit
//! holding its distance from the previous set bit (the first is measured from
//! position -1). A window is never empty, so no distance exceeds `2h - 1`.

use crate::byte_code::{ByteCode, CodeReader, CodeVariant};
use crate::container::deflate_block;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlagEncoding {
    Bitmap,
    Diff,
}

/// Largest `h` whose gaps fit a byte.
pub const MAX_DIFF_H: u32 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LmParams {
    /// Lines per block, a multiple of 8.
    pub h: u32,
    pub flags: FlagEncoding,
    pub code: CodeVariant,
}

impl LmParams {
    /// Uses the three-length byte code for the long list.
    pub fn new(h: u32, flags: FlagEncoding) -> Result<Self> {
        Self::with_code(h, flags, CodeVariant::B)
    }

    pub fn with_code(h: u32, flags: FlagEncoding, code: CodeVariant) -> Result<Self> {
        let params = LmParams { h, flags, code };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h == 0 || !self.h.is_multiple_of(8) {
            return Err(Error::InvalidParams(format!(
                "h must be a positive multiple of 8, got {}",
                self.h
            )));
        }
        if self.flags == FlagEncoding::Diff && self.h > MAX_DIFF_H {
            return Err(Error::InvalidParams(format!(
                "lm-diff needs h <= {MAX_DIFF_H}, got {}",
                self.h
            )));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        let kind = match self.flags {
            FlagEncoding::Bitmap => "bitmap",
            FlagEncoding::Diff => "diff",
        };
        format!("lm-{kind}/{}", self.h)
    }
}

/// Membership windows of one block, stored as the packed bitstream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagWindows {
    h: u32,
    bits: Vec<u8>,
}

impl FlagWindows {
    pub fn new(h: u32, bits: Vec<u8>) -> Self {
        assert!(h.is_multiple_of(8) && h > 0);
        assert!(bits.len().is_multiple_of(h as usize / 8));
        FlagWindows { h, bits }
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    fn window_bytes(&self) -> usize {
        self.h as usize / 8
    }

    pub fn len(&self) -> usize {
        self.bits.len() / self.window_bytes()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bits
    }

    pub fn window(&self, j: usize) -> &[u8] {
        let w = self.window_bytes();
        &self.bits[j * w..(j + 1) * w]
    }

    pub fn windows(&self) -> impl ExactSizeIterator<Item = &[u8]> + '_ {
        self.bits.chunks_exact(self.window_bytes())
    }

    #[inline]
    pub fn get(&self, j: usize, r: usize) -> bool {
        let pos = j * self.h as usize + r;
        self.bits[pos / 8] & (0x80 >> (pos % 8)) != 0
    }

    /// Positions of set bits in the concatenated bitstream.
    pub fn set_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(i, &byte)| {
            (0..8)
                .filter(move |k| byte & (0x80 >> k) != 0)
                .map(move |k| i * 8 + k)
        })
    }
}

/// Merges `lists` (exactly `h` of them) into the long list and its windows.
pub fn merge_block<L: AsRef<[NodeId]>>(lists: &[L]) -> (Vec<NodeId>, FlagWindows) {
    let h = lists.len();
    assert!(
        h > 0 && h.is_multiple_of(8),
        "block height must be a positive multiple of 8"
    );
    let mut values: Vec<NodeId> = lists
        .iter()
        .flat_map(|l| l.as_ref().iter().copied())
        .collect();
    values.sort_unstable();
    values.dedup();

    let window_bytes = h / 8;
    let mut bits = vec![0u8; values.len() * window_bytes];
    for (r, list) in lists.iter().enumerate() {
        // Each list is a sorted subsequence of the long list.
        let mut j = 0;
        for &v in list.as_ref() {
            j += values[j..].partition_point(|&x| x < v);
            let pos = j * h + r;
            bits[pos / 8] |= 0x80 >> (pos % 8);
        }
    }
    (values, FlagWindows::new(h as u32, bits))
}

/// Line `r` of a block: the values whose window has bit `r` set.
pub fn split_line(values: &[NodeId], windows: &FlagWindows, r: usize) -> Vec<NodeId> {
    (0..values.len())
        .filter(|&j| windows.get(j, r))
        .map(|j| values[j])
        .collect()
}

/// Byte-coded long-list tokens: first value plus one, gaps, terminator.
pub fn long_list_tokens(values: &[NodeId]) -> Vec<u64> {
    let mut tokens = Vec::with_capacity(values.len() + 1);
    if let Some(&first) = values.first() {
        tokens.push(u64::from(first) + 1);
        tokens.extend(values.windows(2).map(|w| u64::from(w[1] - w[0])));
    }
    tokens.push(0);
    tokens
}

/// Distances between successive set bits, the first measured from -1.
pub fn window_gaps(windows: &FlagWindows) -> Vec<u64> {
    let mut last: i64 = -1;
    windows
        .set_positions()
        .map(|pos| {
            let gap = (pos as i64 - last) as u64;
            last = pos as i64;
            gap
        })
        .collect()
}

pub fn encode_lm_block(
    values: &[NodeId],
    windows: &FlagWindows,
    params: &LmParams,
    code: ByteCode,
) -> Result<Vec<u8>> {
    debug_assert_eq!(values.len(), windows.len());
    debug_assert_eq!(windows.h(), params.h);
    let mut out = Vec::with_capacity(values.len() * 2 + windows.as_bytes().len() + 1);
    for t in long_list_tokens(values) {
        code.encode(t, &mut out)?;
    }
    match params.flags {
        FlagEncoding::Bitmap => out.extend_from_slice(windows.as_bytes()),
        FlagEncoding::Diff => {
            for gap in window_gaps(windows) {
                debug_assert!((1..2 * u64::from(params.h)).contains(&gap));
                let byte = u8::try_from(gap).map_err(|_| {
                    Error::InvalidParams(format!("window gap {gap} exceeds a byte"))
                })?;
                out.push(byte);
            }
        }
    }
    Ok(out)
}

/// Decodes the long-list section, returning the values and the byte offset
/// just past the terminator.
fn decode_long_list(plain: &[u8], code: ByteCode) -> Result<(Vec<NodeId>, usize)> {
    let mut reader = CodeReader::new(code, plain);
    let mut values = Vec::new();
    let first = reader.next_value()?;
    if first != 0 {
        let overflow = || Error::corrupt("long-list value exceeds the node id range");
        let mut v = first - 1;
        values.push(NodeId::try_from(v).map_err(|_| overflow())?);
        loop {
            let gap = reader.next_value()?;
            if gap == 0 {
                break;
            }
            v = v
                .checked_add(gap)
                .filter(|&x| x <= u64::from(NodeId::MAX))
                .ok_or_else(overflow)?;
            values.push(v as NodeId);
        }
    }
    Ok((values, reader.position()))
}

pub fn decode_lm_block(
    plain: &[u8],
    params: &LmParams,
    code: ByteCode,
) -> Result<(Vec<NodeId>, FlagWindows)> {
    let (values, offset) = decode_long_list(plain, code)?;
    let flags = &plain[offset..];
    let h = params.h as usize;
    let total_bits = values.len() * h;
    let bits = match params.flags {
        FlagEncoding::Bitmap => {
            if flags.len() != total_bits / 8 {
                return Err(Error::corrupt(format!(
                    "bitmap holds {} bytes, expected {}",
                    flags.len(),
                    total_bits / 8
                )));
            }
            flags.to_vec()
        }
        FlagEncoding::Diff => {
            let mut bits = vec![0u8; total_bits / 8];
            let mut pos: i64 = -1;
            for &gap in flags {
                if gap == 0 {
                    return Err(Error::corrupt("zero gap in window stream"));
                }
                pos += i64::from(gap);
                if pos as usize >= total_bits {
                    return Err(Error::corrupt("window gap runs past the last window"));
                }
                bits[pos as usize / 8] |= 0x80 >> (pos % 8);
            }
            bits
        }
    };
    Ok((values, FlagWindows::new(params.h, bits)))
}

/// Extracts line `r` straight from a plaintext block.
pub fn extract_line(
    plain: &[u8],
    params: &LmParams,
    code: ByteCode,
    r: usize,
) -> Result<Vec<NodeId>> {
    let (values, offset) = decode_long_list(plain, code)?;
    let flags = &plain[offset..];
    let h = params.h as usize;
    let mut out = Vec::new();
    match params.flags {
        FlagEncoding::Bitmap => {
            if flags.len() != values.len() * h / 8 {
                return Err(Error::corrupt("bitmap length does not match the long list"));
            }
            let (byte, mask) = (r / 8, 0x80u8 >> (r % 8));
            let w = h / 8;
            out.extend(
                values
                    .iter()
                    .zip(flags.chunks_exact(w))
                    .filter(|(_, window)| window[byte] & mask != 0)
                    .map(|(&v, _)| v),
            );
        }
        FlagEncoding::Diff => {
            let total = values.len() * h;
            let mut pos = usize::MAX;
            for &gap in flags {
                if gap == 0 {
                    return Err(Error::corrupt("zero gap in window stream"));
                }
                pos = pos.wrapping_add(gap as usize);
                if pos >= total {
                    return Err(Error::corrupt("window gap runs past the last window"));
                }
                if pos % h == r {
                    out.push(values[pos / h]);
                }
            }
        }
    }
    Ok(out)
}

/// Byte code for long-list tokens of a graph with `n` nodes. Shares the
/// bound used by the other codec so `b` depends only on `n` and the variant.
pub fn byte_code_for(n: u64, variant: CodeVariant) -> Result<ByteCode> {
    ByteCode::for_max_value(n + 1, variant)
}

/// Compresses each block of `h` lines independently; block `k` covers
/// lines `[k * h, (k + 1) * h)`.
pub fn compress_blocks(g: &Graph, params: &LmParams, code: ByteCode) -> Result<Vec<Vec<u8>>> {
    params.validate()?;
    let h = params.h as usize;
    let n = g.num_nodes();
    let empty: &[NodeId] = &[];
    let mut lists: Vec<&[NodeId]> = Vec::with_capacity(h);
    let mut blocks = Vec::with_capacity(n.div_ceil(h));
    for start in (0..n).step_by(h) {
        lists.clear();
        lists.extend((start..start + h).map(|i| if i < n { g.successors(i) } else { empty }));
        let (values, windows) = merge_block(&lists);
        let plain = encode_lm_block(&values, &windows, params, code)?;
        blocks.push(deflate_block(&plain));
    }
    Ok(blocks)
}
