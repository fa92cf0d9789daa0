//! The compressed graph container.
//!
//! On-disk layout, all integers little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "WGZC"
//! 4       1     version (1)
//! 5       1     codec: 1 = SSL, 2 = LM-bitmap, 3 = LM-diff
//! 6       1     flag count: 2 or 4 for SSL, 0 for LM
//! 7       1     byte-code variant: 0 = A, 1 = B
//! 8       1     byte-code width b
//! 9       4     BSIZE (SSL) or h (LM)
//! 13      8     n
//! 21      8     m
//! 29      8     block count
//! 37      ...   index entries
//!               SSL: u64 first node, u32 line count,
//!                    u32 residual stream length, u32 flag stream length
//!               LM:  u32 block length
//! ...     ...   payload: the raw DEFLATE streams in index order
//!               (SSL: residual stream, then flag stream, per block)
//! ```

use std::io::{Read, Write};

use flate2::read::DeflateDecoder;
use flate2::write::DeflateEncoder;
use flate2::Compression;

use crate::byte_code::{ByteCode, CodeVariant};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, NodeId};
use crate::lm::{self, FlagEncoding, FlagWindows, LmParams};
use crate::ssl::{self, FlagCount, SslBlockReader, SslParams};

pub const MAGIC: &[u8; 4] = b"WGZC";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 37;
pub const SSL_ENTRY_LEN: usize = 20;
pub const LM_ENTRY_LEN: usize = 4;

/// Fixed DEFLATE level so output is reproducible.
pub const DEFLATE_LEVEL: u32 = 9;

pub fn deflate_block(plain: &[u8]) -> Vec<u8> {
    let mut enc = DeflateEncoder::new(
        Vec::with_capacity(plain.len() / 2 + 16),
        Compression::new(DEFLATE_LEVEL),
    );
    enc.write_all(plain).expect("in-memory deflate");
    enc.finish().expect("in-memory deflate")
}

/// Inflates a raw DEFLATE stream; `size_hint` only preallocates.
pub fn inflate_block(compressed: &[u8], size_hint: usize) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(size_hint);
    DeflateDecoder::new(compressed)
        .read_to_end(&mut out)
        .map_err(|e| Error::corrupt(format!("deflate stream: {e}")))?;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Codec {
    Ssl(SslParams),
    Lm(LmParams),
}

impl Codec {
    fn id(&self) -> u8 {
        match self {
            Codec::Ssl(_) => 1,
            Codec::Lm(p) if p.flags == FlagEncoding::Bitmap => 2,
            Codec::Lm(_) => 3,
        }
    }

    pub fn code_variant(&self) -> CodeVariant {
        match self {
            Codec::Ssl(p) => p.code,
            Codec::Lm(p) => p.code,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Codec::Ssl(p) => p.validate(),
            Codec::Lm(p) => p.validate(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Codec::Ssl(p) => format!("ssl-{}/{}", p.label(), p.bsize),
            Codec::Lm(p) => p.label(),
        }
    }

    /// Byte code a graph with `n` nodes is compressed with.
    pub fn byte_code(&self, n: u64) -> Result<ByteCode> {
        match self {
            Codec::Ssl(p) => ssl::byte_code_for(n, p.code),
            Codec::Lm(p) => lm::byte_code_for(n, p.code),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub codec: Codec,
    pub code: ByteCode,
    pub n: u64,
    pub m: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SslEntry {
    pub first_node: u64,
    pub lines: u32,
    pub residual_len: u32,
    pub flags_len: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockIndex {
    Ssl(Vec<SslEntry>),
    Lm(Vec<u32>),
}

impl BlockIndex {
    pub fn len(&self) -> usize {
        match self {
            BlockIndex::Ssl(e) => e.len(),
            BlockIndex::Lm(e) => e.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn entry_len(&self) -> usize {
        match self {
            BlockIndex::Ssl(_) => SSL_ENTRY_LEN,
            BlockIndex::Lm(_) => LM_ENTRY_LEN,
        }
    }

    fn block_bytes(&self, k: usize) -> usize {
        match self {
            BlockIndex::Ssl(e) => e[k].residual_len as usize + e[k].flags_len as usize,
            BlockIndex::Lm(e) => e[k] as usize,
        }
    }
}

/// A compressed graph: header, block index and payload.
///
/// Immutable once built; queries take `&self` and may run concurrently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedGraph {
    header: Header,
    index: BlockIndex,
    payload: Vec<u8>,
    // Payload offset of each block, derived from the index on load.
    starts: Vec<usize>,
}

fn len_u32(len: usize) -> Result<u32> {
    u32::try_from(len).map_err(|_| Error::InvalidParams("compressed block exceeds 4 GiB".into()))
}

impl CompressedGraph {
    pub fn compress(g: &Graph, codec: Codec) -> Result<Self> {
        codec.validate()?;
        let n = g.num_nodes() as u64;
        let code = codec.byte_code(n)?;
        let header = Header {
            codec,
            code,
            n,
            m: g.num_edges(),
        };
        let mut payload = Vec::new();
        let index = match &codec {
            Codec::Ssl(params) => {
                let blocks = ssl::compress_blocks(g, params, code)?;
                let mut entries = Vec::with_capacity(blocks.len());
                for b in blocks {
                    entries.push(SslEntry {
                        first_node: b.first_node,
                        lines: b.lines,
                        residual_len: len_u32(b.residuals.len())?,
                        flags_len: len_u32(b.flags.len())?,
                    });
                    payload.extend_from_slice(&b.residuals);
                    payload.extend_from_slice(&b.flags);
                }
                BlockIndex::Ssl(entries)
            }
            Codec::Lm(params) => {
                let blocks = lm::compress_blocks(g, params, code)?;
                let mut entries = Vec::with_capacity(blocks.len());
                for b in blocks {
                    entries.push(len_u32(b.len())?);
                    payload.extend_from_slice(&b);
                }
                BlockIndex::Lm(entries)
            }
        };
        Ok(Self::assemble(header, index, payload))
    }

    fn assemble(header: Header, index: BlockIndex, payload: Vec<u8>) -> Self {
        let mut starts = Vec::with_capacity(index.len());
        let mut offset = 0;
        for k in 0..index.len() {
            starts.push(offset);
            offset += index.block_bytes(k);
        }
        debug_assert_eq!(offset, payload.len());
        CompressedGraph {
            header,
            index,
            payload,
            starts,
        }
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    pub fn codec(&self) -> Codec {
        self.header.codec
    }

    pub fn index(&self) -> &BlockIndex {
        &self.index
    }

    pub fn num_nodes(&self) -> u64 {
        self.header.n
    }

    pub fn num_edges(&self) -> u64 {
        self.header.m
    }

    pub fn num_blocks(&self) -> usize {
        self.index.len()
    }

    pub fn payload_len(&self) -> usize {
        self.payload.len()
    }

    pub fn index_len(&self) -> usize {
        self.index.len() * self.index.entry_len()
    }

    /// Serialized size in bytes: header, index and payload.
    pub fn size_bytes(&self) -> usize {
        HEADER_LEN + self.index_len() + self.payload.len()
    }

    pub fn measured_size_bits(&self) -> u64 {
        8 * self.size_bytes() as u64
    }

    /// Bits per edge, or `None` for an edgeless graph.
    pub fn bits_per_edge(&self) -> Option<f64> {
        (self.header.m > 0).then(|| self.measured_size_bits() as f64 / self.header.m as f64)
    }

    /// Block holding `node` and the node's line number inside it.
    pub fn locate(&self, node: u64) -> Result<(usize, usize)> {
        if node >= self.header.n {
            return Err(Error::NodeOutOfRange {
                node,
                n: self.header.n,
            });
        }
        Ok(match (&self.index, &self.header.codec) {
            (BlockIndex::Ssl(entries), _) => {
                let k = entries.partition_point(|e| e.first_node <= node) - 1;
                (k, (node - entries[k].first_node) as usize)
            }
            (BlockIndex::Lm(_), Codec::Lm(p)) => {
                let h = u64::from(p.h);
                ((node / h) as usize, (node % h) as usize)
            }
            _ => unreachable!("index kind always matches the codec"),
        })
    }

    fn ssl_streams(&self, k: usize, entry: &SslEntry) -> Result<(Vec<u8>, Vec<u8>)> {
        let start = self.starts[k];
        let mid = start + entry.residual_len as usize;
        let end = mid + entry.flags_len as usize;
        let residuals = inflate_block(&self.payload[start..mid], entry.residual_len as usize * 3)?;
        let flags = inflate_block(&self.payload[mid..end], entry.flags_len as usize * 3)?;
        Ok((residuals, flags))
    }

    fn lm_plain(&self, k: usize, len: u32) -> Result<Vec<u8>> {
        let start = self.starts[k];
        inflate_block(&self.payload[start..start + len as usize], len as usize * 4)
    }

    fn check_ids(&self, list: &[NodeId]) -> Result<()> {
        match list.last() {
            Some(&v) if u64::from(v) >= self.header.n => Err(Error::corrupt(format!(
                "decoded successor {v} out of range"
            ))),
            _ => Ok(()),
        }
    }

    /// Successor list of `node`, decoding only the block that holds it.
    pub fn successors(&self, node: u64) -> Result<Vec<NodeId>> {
        let (k, line) = self.locate(node)?;
        let list = match (&self.index, &self.header.codec) {
            (BlockIndex::Ssl(entries), Codec::Ssl(p)) => {
                let entry = &entries[k];
                let (residuals, flags) = self.ssl_streams(k, entry)?;
                let mut reader =
                    SslBlockReader::new(&residuals, &flags, entry.lines, self.header.code, p.flags);
                for _ in 0..line {
                    reader.next_line()?;
                }
                reader
                    .next_line()?
                    .ok_or_else(|| Error::corrupt("block ended early"))?
                    .to_vec()
            }
            (BlockIndex::Lm(lens), Codec::Lm(p)) => {
                let plain = self.lm_plain(k, lens[k])?;
                lm::extract_line(&plain, p, self.header.code, line)?
            }
            _ => unreachable!("index kind always matches the codec"),
        };
        self.check_ids(&list)?;
        Ok(list)
    }

    /// Decodes the long list and windows of LM block `k`.
    pub fn lm_block(&self, k: usize) -> Result<(Vec<NodeId>, FlagWindows)> {
        match (&self.index, &self.header.codec) {
            (BlockIndex::Lm(lens), Codec::Lm(p)) => {
                let plain = self.lm_plain(k, lens[k])?;
                lm::decode_lm_block(&plain, p, self.header.code)
            }
            _ => Err(Error::InvalidParams("not an LM container".into())),
        }
    }

    /// Decodes every block in order and rebuilds the graph.
    pub fn decompress(&self) -> Result<Graph> {
        let n = self.header.n as usize;
        let mut builder = GraphBuilder::with_capacity(n, self.header.m.min(1 << 32) as usize);
        match (&self.index, &self.header.codec) {
            (BlockIndex::Ssl(entries), Codec::Ssl(p)) => {
                for (k, entry) in entries.iter().enumerate() {
                    let (residuals, flags) = self.ssl_streams(k, entry)?;
                    let mut reader = SslBlockReader::new(
                        &residuals,
                        &flags,
                        entry.lines,
                        self.header.code,
                        p.flags,
                    );
                    while let Some(line) = reader.next_line()? {
                        self.check_ids(line)?;
                        builder.push_list(line);
                    }
                    reader.finish()?;
                }
            }
            (BlockIndex::Lm(_), Codec::Lm(p)) => {
                let h = p.h as usize;
                let mut line = Vec::new();
                for k in 0..self.index.len() {
                    let (values, windows) = self.lm_block(k)?;
                    self.check_ids(&values)?;
                    for r in 0..h {
                        line.clear();
                        line.extend(
                            (0..values.len())
                                .filter(|&j| windows.get(j, r))
                                .map(|j| values[j]),
                        );
                        if k * h + r < n {
                            builder.push_list(&line);
                        } else if !line.is_empty() {
                            return Err(Error::corrupt("padding line is not empty"));
                        }
                    }
                }
            }
            _ => unreachable!("index kind always matches the codec"),
        }
        let g = builder.finish();
        if g.num_nodes() != n {
            return Err(Error::corrupt("decoded node count differs from header"));
        }
        if g.num_edges() != self.header.m {
            return Err(Error::corrupt(format!(
                "decoded {} edges, header says {}",
                g.num_edges(),
                self.header.m
            )));
        }
        Ok(g)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let h = &self.header;
        let (flag_count, param) = match &h.codec {
            Codec::Ssl(p) => (p.flags.get(), p.bsize),
            Codec::Lm(p) => (0, p.h),
        };
        let variant = match h.code.variant() {
            CodeVariant::A => 0u8,
            CodeVariant::B => 1u8,
        };
        let mut head = Vec::with_capacity(HEADER_LEN + self.index_len());
        head.extend_from_slice(MAGIC);
        head.extend_from_slice(&[VERSION, h.codec.id(), flag_count, variant, h.code.width()]);
        head.extend_from_slice(&param.to_le_bytes());
        head.extend_from_slice(&h.n.to_le_bytes());
        head.extend_from_slice(&h.m.to_le_bytes());
        head.extend_from_slice(&(self.index.len() as u64).to_le_bytes());
        match &self.index {
            BlockIndex::Ssl(entries) => {
                for e in entries {
                    head.extend_from_slice(&e.first_node.to_le_bytes());
                    head.extend_from_slice(&e.lines.to_le_bytes());
                    head.extend_from_slice(&e.residual_len.to_le_bytes());
                    head.extend_from_slice(&e.flags_len.to_le_bytes());
                }
            }
            BlockIndex::Lm(lens) => {
                for len in lens {
                    head.extend_from_slice(&len.to_le_bytes());
                }
            }
        }
        out.write_all(&head)?;
        out.write_all(&self.payload)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.size_bytes());
        self.write_to(&mut out)
            .expect("writing to a Vec cannot fail");
        out
    }

    pub fn from_bytes(input: &[u8]) -> Result<Self> {
        let mut r = ByteReader(input);
        if input.len() < MAGIC.len() || r.take(4)? != MAGIC {
            return Err(Error::BadMagic);
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let codec_id = r.u8()?;
        let flag_count = r.u8()?;
        let variant = match r.u8()? {
            0 => CodeVariant::A,
            1 => CodeVariant::B,
            v => {
                return Err(Error::InvalidParams(format!(
                    "unknown byte-code variant {v}"
                )))
            }
        };
        let code = ByteCode::new(variant, r.u8()?)?;
        let param = r.u32()?;
        let n = r.u64()?;
        let m = r.u64()?;
        let block_count = r.u64()?;

        let codec = match codec_id {
            1 => {
                let flags = FlagCount::from_u8(flag_count)
                    .ok_or_else(|| Error::InvalidParams(format!("flag count {flag_count}")))?;
                Codec::Ssl(SslParams::new(flags, variant, param)?)
            }
            2 | 3 => {
                if flag_count != 0 {
                    return Err(Error::InvalidParams(format!(
                        "flag count {flag_count} for LM"
                    )));
                }
                let flags = if codec_id == 2 {
                    FlagEncoding::Bitmap
                } else {
                    FlagEncoding::Diff
                };
                Codec::Lm(LmParams::with_code(param, flags, variant)?)
            }
            id => return Err(Error::UnknownCodec(id)),
        };
        if n > u64::from(NodeId::MAX) {
            return Err(Error::InvalidParams(format!("node count {n} too large")));
        }
        if code.max_value() < n + 1 {
            return Err(Error::InvalidParams(format!(
                "byte-code width {} too small for {n} nodes",
                code.width()
            )));
        }

        let entry_len = match codec {
            Codec::Ssl(_) => SSL_ENTRY_LEN,
            Codec::Lm(_) => LM_ENTRY_LEN,
        } as u64;
        if block_count.saturating_mul(entry_len) > r.0.len() as u64 {
            return Err(Error::IndexMismatch(format!(
                "{block_count} index entries do not fit in the file"
            )));
        }
        let mut total: u64 = 0;
        let index = match codec {
            Codec::Ssl(_) => {
                let mut entries = Vec::with_capacity(block_count as usize);
                let mut next_node = 0u64;
                for _ in 0..block_count {
                    let e = SslEntry {
                        first_node: r.u64()?,
                        lines: r.u32()?,
                        residual_len: r.u32()?,
                        flags_len: r.u32()?,
                    };
                    if e.first_node != next_node || e.lines == 0 {
                        return Err(Error::IndexMismatch(format!(
                            "block {} starts at node {} with {} lines, expected node {next_node}",
                            entries.len(),
                            e.first_node,
                            e.lines
                        )));
                    }
                    next_node += u64::from(e.lines);
                    total += u64::from(e.residual_len) + u64::from(e.flags_len);
                    entries.push(e);
                }
                if next_node != n {
                    return Err(Error::IndexMismatch(format!(
                        "blocks cover {next_node} of {n} nodes"
                    )));
                }
                BlockIndex::Ssl(entries)
            }
            Codec::Lm(p) => {
                let expected = n.div_ceil(u64::from(p.h));
                if block_count != expected {
                    return Err(Error::IndexMismatch(format!(
                        "{block_count} blocks, expected {expected} for {n} nodes"
                    )));
                }
                let mut lens = Vec::with_capacity(block_count as usize);
                for _ in 0..block_count {
                    let len = r.u32()?;
                    total += u64::from(len);
                    lens.push(len);
                }
                BlockIndex::Lm(lens)
            }
        };
        if total != r.0.len() as u64 {
            return Err(Error::IndexMismatch(format!(
                "index accounts for {total} payload bytes, file has {}",
                r.0.len()
            )));
        }
        let header = Header { codec, code, n, m };
        Ok(Self::assemble(header, index, r.0.to_vec()))
    }
}

struct ByteReader<'a>(&'a [u8]);

impl<'a> ByteReader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.0.len() < len {
            return Err(Error::Truncated("container header or index"));
        }
        let (head, rest) = self.0.split_at(len);
        self.0 = rest;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
