//! Command implementations behind the `wgz` binary.
//!
//! Exit statuses: 0 on success, 1 for usage errors, 2 for data errors.

use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use wgz::bench::{run_bench, BenchConfig, BenchReport};
use wgz::container::MAGIC;
use wgz::stats::{GraphStats, WindowStats};
use wgz::{
    parse_text, write_text, CodeVariant, Codec, CompressedGraph, Error, FlagCount, FlagEncoding,
    LmParams, SslParams,
};

#[derive(Debug, Parser)]
#[command(
    name = "wgz",
    version,
    about = "Compressed Web graphs with random list access"
)]
pub struct Cli {
    /// Print reports as key=value lines.
    #[arg(long, global = true)]
    pub porcelain: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress an adjacency-text graph into a container file.
    Compress {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = CodecArg::LmBitmap)]
        codec: CodecArg,
        /// SSL copy-flag alphabet size (2 or 4) [default: 4]
        #[arg(long)]
        flags: Option<u8>,
        /// Byte code: a = lengths 1/b, b = lengths 1/2/b [default: b]
        #[arg(long, value_enum)]
        code: Option<CodeArg>,
        /// SSL residual block threshold in bytes [default: 8192]
        #[arg(long)]
        bsize: Option<u32>,
        /// LM lines per block [default: 32]
        #[arg(long)]
        h: Option<u32>,
    },
    /// Expand a container back into adjacency text.
    Decompress { input: PathBuf, output: PathBuf },
    /// Print the successors of one node.
    Get { input: PathBuf, node: u64 },
    /// Time random list extractions.
    Bench {
        input: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Summarize a text graph or a container.
    Stats { input: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CodecArg {
    Ssl,
    LmBitmap,
    LmDiff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CodeArg {
    A,
    B,
}

impl From<CodeArg> for CodeVariant {
    fn from(c: CodeArg) -> Self {
        match c {
            CodeArg::A => CodeVariant::A,
            CodeArg::B => CodeVariant::B,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Data(err) => write!(f, "error: {err:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        CliError::Data(err)
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError::Data(err.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Builds the codec selected by `compress` flags, rejecting flags that do not
/// apply to it.
pub fn codec_from_args(
    codec: CodecArg,
    flags: Option<u8>,
    code: Option<CodeArg>,
    bsize: Option<u32>,
    h: Option<u32>,
) -> CliResult<Codec> {
    let usage = |e: Error| CliError::Usage(e.to_string());
    let code = code.map_or(CodeVariant::B, CodeVariant::from);
    match codec {
        CodecArg::Ssl => {
            if h.is_some() {
                return Err(CliError::Usage("--h applies to lm codecs only".into()));
            }
            let flags = match flags.unwrap_or(4) {
                2 => FlagCount::Two,
                4 => FlagCount::Four,
                other => {
                    return Err(CliError::Usage(format!(
                        "--flags must be 2 or 4, got {other}"
                    )))
                }
            };
            let params = SslParams::new(flags, code, bsize.unwrap_or(8192)).map_err(usage)?;
            Ok(Codec::Ssl(params))
        }
        CodecArg::LmBitmap | CodecArg::LmDiff => {
            if flags.is_some() || bsize.is_some() {
                return Err(CliError::Usage(
                    "--flags and --bsize apply to ssl only".into(),
                ));
            }
            let encoding = if codec == CodecArg::LmBitmap {
                FlagEncoding::Bitmap
            } else {
                FlagEncoding::Diff
            };
            let params = LmParams::with_code(h.unwrap_or(32), encoding, code).map_err(usage)?;
            Ok(Codec::Lm(params))
        }
    }
}

/// Key/value report printed either aligned or as `key=value` lines.
#[derive(Debug, Default)]
pub struct Report(Vec<(&'static str, String)>);

impl Report {
    pub fn push(&mut self, key: &'static str, value: impl Display) {
        self.0.push((key, value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn write(&self, out: &mut dyn Write, porcelain: bool) -> io::Result<()> {
        let width = self.0.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.0 {
            if porcelain {
                writeln!(out, "{k}={v}")?;
            } else {
                writeln!(out, "{k:width$}  {v}")?;
            }
        }
        Ok(())
    }
}

fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    v.map_or_else(|| "n/a".to_owned(), |v| format!("{v:.decimals$}"))
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Data)
}

pub fn load_container(path: &Path) -> CliResult<CompressedGraph> {
    let bytes = read(path)?;
    CompressedGraph::from_bytes(&bytes)
        .with_context(|| format!("loading container {}", path.display()))
        .map_err(CliError::Data)
}

pub fn compress(input: &Path, output: &Path, codec: Codec) -> CliResult<Report> {
    let text = read(input)?;
    let g = parse_text(&text).with_context(|| format!("parsing {}", input.display()))?;
    let cg = CompressedGraph::compress(&g, codec).context("compressing")?;
    fs::write(output, cg.to_bytes()).with_context(|| format!("writing {}", output.display()))?;
    let mut report = Report::default();
    report.push("codec", codec.label());
    report.push("nodes", cg.num_nodes());
    report.push("edges", cg.num_edges());
    report.push("blocks", cg.num_blocks());
    report.push("size_bits", cg.measured_size_bits());
    report.push("bpe", fmt_opt(cg.bits_per_edge(), 4));
    Ok(report)
}

pub fn decompress(input: &Path, output: &Path) -> CliResult<()> {
    let cg = load_container(input)?;
    let g = cg.decompress().context("decoding container")?;
    let file =
        fs::File::create(output).with_context(|| format!("creating {}", output.display()))?;
    let mut out = io::BufWriter::new(file);
    write_text(&g, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Writes the successors of `node` as one adjacency-text line.
pub fn get(cg: &CompressedGraph, node: u64, out: &mut dyn Write) -> CliResult<()> {
    let list = match cg.successors(node) {
        Err(e @ Error::NodeOutOfRange { .. }) => return Err(CliError::Usage(e.to_string())),
        other => other.context("decoding block")?,
    };
    let line: Vec<String> = list.iter().map(u32::to_string).collect();
    writeln!(out, "{}", line.join(" "))?;
    Ok(())
}

pub fn bench(cg: &CompressedGraph, config: &BenchConfig) -> CliResult<BenchReport> {
    run_bench(cg, config).map_err(|e| match e {
        Error::InvalidParams(msg) => CliError::Usage(msg),
        other => CliError::Data(other.into()),
    })
}

pub fn bench_report(r: &BenchReport) -> Report {
    let mut report = Report::default();
    report.push("codec", &r.codec);
    report.push("queries", r.queries);
    report.push("seed", r.seed);
    report.push("threads", r.threads);
    report.push("edges_touched", r.edges_touched);
    report.push("total_ms", format!("{:.3}", r.total.as_secs_f64() * 1e3));
    report.push("time_per_edge_us", fmt_opt(r.time_per_edge_us(), 4));
    report.push("bpe", fmt_opt(r.bits_per_edge, 4));
    report
}

pub fn stats(input: &Path) -> CliResult<Report> {
    let bytes = read(input)?;
    let mut report = Report::default();
    let (graph, container) = if bytes.starts_with(MAGIC) {
        let cg = CompressedGraph::from_bytes(&bytes).context("loading container")?;
        let g = cg.decompress().context("decoding container")?;
        (g, Some(cg))
    } else {
        let g = parse_text(&bytes).with_context(|| format!("parsing {}", input.display()))?;
        (g, None)
    };
    let s = GraphStats::of(&graph);
    report.push("nodes", s.nodes);
    report.push("edges", s.edges);
    report.push("edges_per_node", format!("{:.2}", s.edges_per_node()));
    report.push("empty_lists_pct", format!("{:.3}", s.empty_percent()));
    report.push("longest_list", s.longest_list);
    if let Some(cg) = container {
        report.push("codec", cg.codec().label());
        report.push("blocks", cg.num_blocks());
        report.push("size_bits", cg.measured_size_bits());
        report.push("bpe", fmt_opt(cg.bits_per_edge(), 4));
        if let Some(ws) = WindowStats::of(&cg).context("decoding flag windows")? {
            report.push("flag_windows", ws.windows);
            report.push("single_bit_windows", fmt_opt(ws.single_bit_share(), 4));
        }
    }
    Ok(report)
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    let porcelain = cli.porcelain;
    match cli.command {
        Command::Compress {
            input,
            output,
            codec,
            flags,
            code,
            bsize,
            h,
        } => {
            let codec = codec_from_args(codec, flags, code, bsize, h)?;
            compress(&input, &output, codec)?.write(out, porcelain)?;
        }
        Command::Decompress { input, output } => decompress(&input, &output)?,
        Command::Get { input, node } => get(&load_container(&input)?, node, out)?,
        Command::Bench {
            input,
            queries,
            seed,
            threads,
        } => {
            let cg = load_container(&input)?;
            let report = bench(
                &cg,
                &BenchConfig {
                    queries,
                    seed,
                    threads,
                },
            )?;
            bench_report(&report).write(out, porcelain)?;
        }
        Command::Stats { input } => stats(&input)?.write(out, porcelain)?,
    }
    Ok(())
}
