//! Codec based on the similarity of successive lists.
//!
//! Every line is described against the line immediately before it. Each
//! element `p` of the previous line gets a flag: 0 when `p` recurs, 2 when
//! `p + 1` occurs, 3 when `p + 2` occurs, 1 otherwise (the smallest applicable
//! flag wins). With two flags only 0 and 1 are used. Values not implied by a
//! flag are residuals; they are gap coded with run-length coding of unit gaps
//! and byte coded.
//!
//! Lines accumulate into a block until the byte-coded residual buffer reaches
//! `bsize` bytes. The first line of a block has no reference, so every block
//! decodes on its own. The residual and flag buffers of a block are DEFLATE
//! compressed separately.
//!
//! Residual token alphabet: `0` ends the line, `1` is a run escape followed by
//! a run length (at least [`MIN_RUN`]) of unit gaps, the first value `v` is
//! stored as `v + 2` and every other gap `d` as `d + 1`.
//!
//! Flags are stored two bits each, most significant first, four per byte;
//! each line's flags start on a fresh byte.

use crate::byte_code::{ByteCode, CodeReader, CodeVariant};
use crate::container::deflate_block;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Shortest run of unit gaps that is run-length coded.
pub const MIN_RUN: usize = 5;

const TERMINATOR: u64 = 0;
const RUN_ESCAPE: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlagCount {
    Two,
    Four,
}

impl FlagCount {
    pub fn get(self) -> u8 {
        match self {
            FlagCount::Two => 2,
            FlagCount::Four => 4,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            2 => Some(FlagCount::Two),
            4 => Some(FlagCount::Four),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SslParams {
    /// Close a block once its byte-coded residuals reach this many bytes.
    pub bsize: u32,
    pub flags: FlagCount,
    pub code: CodeVariant,
}

impl SslParams {
    pub fn new(flags: FlagCount, code: CodeVariant, bsize: u32) -> Result<Self> {
        let params = SslParams { bsize, flags, code };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bsize == 0 {
            return Err(Error::InvalidParams("bsize must be at least 1".into()));
        }
        Ok(())
    }

    /// Short variant label: `2a`, `2b`, `4a` or `4b`.
    pub fn label(&self) -> String {
        let code = match self.code {
            CodeVariant::A => 'a',
            CodeVariant::B => 'b',
        };
        format!("{}{}", self.flags.get(), code)
    }
}

/// Flags of `line` against `prev` and the residuals left over.
pub fn compute_flags(prev: &[NodeId], line: &[NodeId], flags: FlagCount) -> (Vec<u8>, Vec<NodeId>) {
    let mut out = Vec::with_capacity(prev.len());
    let mut implied = vec![false; line.len()];
    let mut j = 0;
    for &p in prev {
        while j < line.len() && line[j] < p {
            j += 1;
        }
        let p = u64::from(p);
        let at = |k: usize| line.get(k).map(|&v| u64::from(v));
        let flag = if at(j) == Some(p) {
            implied[j] = true;
            0
        } else if flags == FlagCount::Two {
            1
        } else if at(j) == Some(p + 1) {
            // line[j] > p here, so p + 1 can only sit at j.
            implied[j] = true;
            2
        } else if at(j) == Some(p + 2) {
            implied[j] = true;
            3
        } else {
            1
        };
        out.push(flag);
    }
    let residuals = line
        .iter()
        .zip(&implied)
        .filter(|(_, &hit)| !hit)
        .map(|(&v, _)| v)
        .collect();
    (out, residuals)
}

/// Reconstructs a line from its reference, flags and residuals. The result
/// is sorted and duplicate-free even when two flags imply the same value.
pub fn apply_flags(
    prev: &[NodeId],
    flags: &[u8],
    residuals: &[NodeId],
    out: &mut Vec<NodeId>,
) -> Result<()> {
    if prev.len() != flags.len() {
        return Err(Error::corrupt("flag count differs from reference length"));
    }
    out.clear();
    for (&p, &f) in prev.iter().zip(flags) {
        let shift = match f {
            0 => 0,
            1 => continue,
            2 => 1,
            3 => 2,
            _ => return Err(Error::corrupt(format!("invalid copy flag {f}"))),
        };
        let v = p
            .checked_add(shift)
            .ok_or_else(|| Error::corrupt("flag implies a value past the id range"))?;
        out.push(v);
    }
    out.extend_from_slice(residuals);
    out.sort_unstable();
    out.dedup();
    Ok(())
}

/// Residual token stream before byte coding.
pub fn residual_tokens(residuals: &[NodeId]) -> Vec<u64> {
    let mut tokens = Vec::with_capacity(residuals.len() + 1);
    push_residual_tokens(residuals, |t| tokens.push(t));
    tokens
}

fn push_residual_tokens(residuals: &[NodeId], mut emit: impl FnMut(u64)) {
    let Some(&first) = residuals.first() else {
        emit(TERMINATOR);
        return;
    };
    emit(u64::from(first) + 2);
    let mut i = 1;
    while i < residuals.len() {
        let gap = u64::from(residuals[i] - residuals[i - 1]);
        if gap == 1 {
            let run = residuals[i..]
                .iter()
                .zip(&residuals[i - 1..])
                .take_while(|(v, u)| **v - **u == 1)
                .count();
            if run >= MIN_RUN {
                emit(RUN_ESCAPE);
                emit(run as u64);
                i += run;
                continue;
            }
        }
        emit(gap + 1);
        i += 1;
    }
    emit(TERMINATOR);
}

/// Byte codes the residual tokens of one line into `out`. Returns the number
/// of bytes written.
pub fn encode_residual_line(
    residuals: &[NodeId],
    code: ByteCode,
    out: &mut Vec<u8>,
) -> Result<usize> {
    let start = out.len();
    let mut result = Ok(());
    push_residual_tokens(residuals, |t| {
        if result.is_ok() {
            result = code.encode(t, out).map(drop);
        }
    });
    result.map(|()| out.len() - start)
}

/// Decodes one residual line, consuming through its terminator.
pub fn decode_residual_line(reader: &mut CodeReader<'_>, out: &mut Vec<NodeId>) -> Result<()> {
    out.clear();
    let first = reader.next_value()?;
    match first {
        TERMINATOR => return Ok(()),
        RUN_ESCAPE => return Err(Error::corrupt("run escape at the start of a line")),
        _ => {}
    }
    let mut v = first - 2;
    let overflow = || Error::corrupt("residual exceeds the node id range");
    out.push(NodeId::try_from(v).map_err(|_| overflow())?);
    loop {
        match reader.next_value()? {
            TERMINATOR => return Ok(()),
            RUN_ESCAPE => {
                let run = reader.next_value()?;
                if run < MIN_RUN as u64 {
                    return Err(Error::corrupt(format!(
                        "run length {run} below the minimum of {MIN_RUN}"
                    )));
                }
                let end = v.checked_add(run).filter(|&e| e <= u64::from(NodeId::MAX));
                let end = end.ok_or_else(overflow)?;
                out.extend((v + 1..=end).map(|x| x as NodeId));
                v = end;
            }
            token => {
                v = v
                    .checked_add(token - 1)
                    .filter(|&x| x <= u64::from(NodeId::MAX))
                    .ok_or_else(overflow)?;
                out.push(v as NodeId);
            }
        }
    }
}

/// Appends flags to `out`, two bits each, starting on a fresh byte.
pub fn pack_flags(flags: &[u8], out: &mut Vec<u8>) {
    for chunk in flags.chunks(4) {
        let mut byte = 0u8;
        for (k, &f) in chunk.iter().enumerate() {
            byte |= (f & 0b11) << (6 - 2 * k);
        }
        out.push(byte);
    }
}

/// Reads `count` packed flags from the front of `input`; returns the number
/// of bytes consumed.
pub fn unpack_flags(input: &[u8], count: usize, out: &mut Vec<u8>) -> Result<usize> {
    let len = count.div_ceil(4);
    let bytes = input
        .get(..len)
        .ok_or(Error::Truncated("flag stream ends inside a line"))?;
    out.clear();
    out.extend((0..count).map(|k| (bytes[k / 4] >> (6 - 2 * (k % 4))) & 0b11));
    Ok(len)
}

/// Byte code used for residual tokens of a graph with `n` nodes. The largest
/// token is the first-value token `(n - 1) + 2`.
pub fn byte_code_for(n: u64, variant: CodeVariant) -> Result<ByteCode> {
    ByteCode::for_max_value(n + 1, variant)
}

/// One compressed block before framing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SslBlock {
    pub first_node: u64,
    pub lines: u32,
    pub residuals: Vec<u8>,
    pub flags: Vec<u8>,
}

/// Compresses `g` into blocks in node order.
pub fn compress_blocks(g: &Graph, params: &SslParams, code: ByteCode) -> Result<Vec<SslBlock>> {
    params.validate()?;
    let bsize = params.bsize as usize;
    let mut blocks = Vec::new();
    let mut out_b = Vec::with_capacity(bsize + 64);
    let mut out_f = Vec::new();
    let mut first_node = 0usize;
    let mut prev: &[NodeId] = &[];

    let mut flush =
        |first_node: usize, lines: usize, out_b: &mut Vec<u8>, out_f: &mut Vec<u8>| -> Result<()> {
            let lines = u32::try_from(lines)
                .map_err(|_| Error::InvalidParams("block holds too many lines".into()))?;
            blocks.push(SslBlock {
                first_node: first_node as u64,
                lines,
                residuals: deflate_block(out_b),
                flags: deflate_block(out_f),
            });
            out_b.clear();
            out_f.clear();
            Ok(())
        };

    for (node, line) in g.lists().enumerate() {
        if node == first_node {
            encode_residual_line(line, code, &mut out_b)?;
        } else {
            let (flags, residuals) = compute_flags(prev, line, params.flags);
            debug_assert!(partition_holds(prev, &flags, &residuals, line));
            pack_flags(&flags, &mut out_f);
            encode_residual_line(&residuals, code, &mut out_b)?;
        }
        prev = line;
        if out_b.len() >= bsize {
            flush(first_node, node + 1 - first_node, &mut out_b, &mut out_f)?;
            first_node = node + 1;
        }
    }
    if first_node < g.num_nodes() {
        flush(
            first_node,
            g.num_nodes() - first_node,
            &mut out_b,
            &mut out_f,
        )?;
    }
    Ok(blocks)
}

fn partition_holds(prev: &[NodeId], flags: &[u8], residuals: &[NodeId], line: &[NodeId]) -> bool {
    let mut implied: Vec<NodeId> = prev
        .iter()
        .zip(flags)
        .filter_map(|(&p, &f)| match f {
            0 => Some(p),
            2 => Some(p + 1),
            3 => Some(p + 2),
            _ => None,
        })
        .collect();
    implied.sort_unstable();
    implied.dedup();
    let disjoint = residuals.iter().all(|r| implied.binary_search(r).is_err());
    let mut union = implied;
    union.extend_from_slice(residuals);
    union.sort_unstable();
    disjoint && union == line
}

/// Sequential decoder over the plaintext streams of one block.
#[derive(Debug)]
pub struct SslBlockReader<'a> {
    residuals: CodeReader<'a>,
    flags: &'a [u8],
    flag_count: FlagCount,
    remaining: u32,
    first: bool,
    prev: Vec<NodeId>,
    line: Vec<NodeId>,
    flag_buf: Vec<u8>,
    resid_buf: Vec<NodeId>,
}

impl<'a> SslBlockReader<'a> {
    pub fn new(
        residuals: &'a [u8],
        flags: &'a [u8],
        lines: u32,
        code: ByteCode,
        flag_count: FlagCount,
    ) -> Self {
        SslBlockReader {
            residuals: CodeReader::new(code, residuals),
            flags,
            flag_count,
            remaining: lines,
            first: true,
            prev: Vec::new(),
            line: Vec::new(),
            flag_buf: Vec::new(),
            resid_buf: Vec::new(),
        }
    }

    /// Decodes the next line of the block.
    pub fn next_line(&mut self) -> Result<Option<&[NodeId]>> {
        if self.remaining == 0 {
            return Ok(None);
        }
        self.remaining -= 1;
        std::mem::swap(&mut self.prev, &mut self.line);
        if self.first {
            self.first = false;
            decode_residual_line(&mut self.residuals, &mut self.line)?;
        } else {
            let used = unpack_flags(self.flags, self.prev.len(), &mut self.flag_buf)?;
            self.flags = &self.flags[used..];
            if self.flag_count == FlagCount::Two && self.flag_buf.iter().any(|&f| f > 1) {
                return Err(Error::corrupt("shift flag in a two-flag stream"));
            }
            decode_residual_line(&mut self.residuals, &mut self.resid_buf)?;
            apply_flags(&self.prev, &self.flag_buf, &self.resid_buf, &mut self.line)?;
        }
        Ok(Some(&self.line))
    }

    /// Checks that both streams were consumed exactly.
    pub fn finish(&self) -> Result<()> {
        if self.remaining != 0 {
            return Err(Error::corrupt("block has undecoded lines"));
        }
        if !self.residuals.is_empty() || !self.flags.is_empty() {
            return Err(Error::corrupt(
                "trailing bytes after the last line of a block",
            ));
        }
        Ok(())
    }
}
