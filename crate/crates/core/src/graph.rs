//! In-memory directed graphs and the plain adjacency-text format.
//!
//! The text format is line oriented. The first line holds the node count
//! `n`; each of the following `n` lines holds the successors of one node as
//! space-separated decimals in strictly increasing order. An empty line is an
//! empty list, and the input must end with a newline.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::{Error, ParseErrorKind, Result};

/// Node identifier, 0-based.
pub type NodeId = u32;

/// A directed graph stored as compressed sparse rows.
///
/// Every successor list is strictly ascending and every successor is below
/// [`Graph::num_nodes`].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Graph {
    /// Builds a graph from per-node successor lists, validating every list.
    pub fn from_lists<I, L>(lists: I) -> Result<Self>
    where
        I: IntoIterator<Item = L>,
        L: AsRef<[NodeId]>,
    {
        let mut builder = GraphBuilder::default();
        for list in lists {
            builder.push_list(list.as_ref());
        }
        let n = builder.num_nodes() as u64;
        for node in 0..builder.num_nodes() {
            let list = builder.list(node);
            if let Err(kind) = check_list(list, n) {
                return Err(Error::Parse {
                    line: node + 2,
                    kind,
                });
            }
        }
        Ok(builder.finish())
    }

    pub fn empty() -> Self {
        Graph {
            offsets: vec![0],
            targets: Vec::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> u64 {
        self.targets.len() as u64
    }

    pub fn successors(&self, node: usize) -> &[NodeId] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn lists(&self) -> impl ExactSizeIterator<Item = &[NodeId]> + '_ {
        self.offsets.windows(2).map(|w| &self.targets[w[0]..w[1]])
    }

    pub fn to_lists(&self) -> Vec<Vec<NodeId>> {
        self.lists().map(<[NodeId]>::to_vec).collect()
    }
}

/// Appends lists without validation; crate-internal decoders use it after
/// they have produced lists they know to be well formed.
#[derive(Debug)]
pub(crate) struct GraphBuilder {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Default for GraphBuilder {
    fn default() -> Self {
        GraphBuilder {
            offsets: vec![0],
            targets: Vec::new(),
        }
    }
}

impl GraphBuilder {
    pub(crate) fn with_capacity(nodes: usize, edges: usize) -> Self {
        let mut offsets = Vec::with_capacity(nodes + 1);
        offsets.push(0);
        GraphBuilder {
            offsets,
            targets: Vec::with_capacity(edges),
        }
    }

    pub(crate) fn push_list(&mut self, list: &[NodeId]) {
        self.targets.extend_from_slice(list);
        self.offsets.push(self.targets.len());
    }

    pub(crate) fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    fn list(&self, node: usize) -> &[NodeId] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    pub(crate) fn finish(self) -> Graph {
        Graph {
            offsets: self.offsets,
            targets: self.targets,
        }
    }
}

fn check_list(list: &[NodeId], n: u64) -> std::result::Result<(), ParseErrorKind> {
    for (i, &s) in list.iter().enumerate() {
        if u64::from(s) >= n {
            return Err(ParseErrorKind::SuccessorOutOfRange {
                successor: s.into(),
                n,
            });
        }
        if i > 0 {
            let previous = list[i - 1];
            if s == previous {
                return Err(ParseErrorKind::DuplicateSuccessor(s));
            }
            if s < previous {
                return Err(ParseErrorKind::NotAscending {
                    previous,
                    successor: s,
                });
            }
        }
    }
    Ok(())
}

fn parse_u64(token: &str) -> std::result::Result<u64, ParseErrorKind> {
    if token.is_empty() || !token.bytes().all(|c| c.is_ascii_digit()) {
        return Err(ParseErrorKind::MalformedInteger(token.to_owned()));
    }
    token
        .parse()
        .map_err(|_| ParseErrorKind::MalformedInteger(token.to_owned()))
}

/// Parses adjacency text. Errors carry the 1-based line number.
pub fn parse_text(input: &[u8]) -> Result<Graph> {
    let err = |line: usize, kind| Error::Parse { line, kind };
    let text = std::str::from_utf8(input)
        .ok()
        .filter(|t| t.is_ascii())
        .ok_or(err(1, ParseErrorKind::NotText))?;
    if text.is_empty() {
        return Err(err(1, ParseErrorKind::MissingNodeCount));
    }
    let Some(body) = text.strip_suffix('\n') else {
        let line = text.split('\n').count();
        return Err(err(line, ParseErrorKind::MissingTrailingNewline));
    };

    let mut lines = body.split('\n');
    let header = lines.next().unwrap_or_default().trim();
    if header.is_empty() {
        return Err(err(1, ParseErrorKind::MissingNodeCount));
    }
    let n = parse_u64(header).map_err(|k| err(1, k))?;
    if n > u64::from(NodeId::MAX) {
        return Err(err(1, ParseErrorKind::TooManyNodes(n)));
    }

    let mut builder = GraphBuilder::with_capacity(n as usize, 0);
    let mut list = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        if i as u64 >= n {
            let found = body.split('\n').count() as u64 - 1;
            return Err(err(
                line_no,
                ParseErrorKind::NodeCountMismatch { declared: n, found },
            ));
        }
        list.clear();
        for token in line.split_ascii_whitespace() {
            let v = parse_u64(token).map_err(|k| err(line_no, k))?;
            if v >= n {
                return Err(err(
                    line_no,
                    ParseErrorKind::SuccessorOutOfRange { successor: v, n },
                ));
            }
            list.push(v as NodeId);
        }
        check_list(&list, n).map_err(|k| err(line_no, k))?;
        builder.push_list(&list);
    }
    let found = builder.num_nodes() as u64;
    if found != n {
        return Err(err(
            found as usize + 2,
            ParseErrorKind::NodeCountMismatch { declared: n, found },
        ));
    }
    Ok(builder.finish())
}

/// Writes `g` in adjacency-text format.
pub fn write_text<W: Write>(g: &Graph, mut out: W) -> io::Result<()> {
    let mut line = String::new();
    writeln!(out, "{}", g.num_nodes())?;
    for list in g.lists() {
        line.clear();
        for (i, v) in list.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            let _ = write!(line, "{v}");
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn to_text(g: &Graph) -> Vec<u8> {
    let mut out = Vec::with_capacity(g.num_nodes() + g.targets.len() * 7 + 16);
    write_text(g, &mut out).expect("writing to a Vec cannot fail");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_err(input: &str) -> (usize, ParseErrorKind) {
        match parse_text(input.as_bytes()) {
            Err(Error::Parse { line, kind }) => (line, kind),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parses_small_graph() {
        let g = parse_text(b"3\n1 2\n\n0\n").unwrap();
        assert_eq!(g.to_lists(), vec![vec![1, 2], vec![], vec![0]]);
        assert_eq!(g.num_edges(), 3);
    }

    #[test]
    fn single_empty_list() {
        let g = parse_text(b"1\n\n").unwrap();
        assert_eq!(g.num_nodes(), 1);
        assert!(g.successors(0).is_empty());
    }

    #[test]
    fn writes_canonical_text() {
        let g = Graph::from_lists([vec![1, 2], vec![], vec![0]]).unwrap();
        assert_eq!(to_text(&g), b"3\n1 2\n\n0\n");
        assert_eq!(to_text(&Graph::empty()), b"0\n");
        assert_eq!(parse_text(b"0\n").unwrap(), Graph::empty());
    }

    #[test]
    fn rejects_duplicates() {
        assert_eq!(
            parse_err("2\n1 1\n\n"),
            (2, ParseErrorKind::DuplicateSuccessor(1))
        );
    }

    #[test]
    fn rejects_descending() {
        assert_eq!(
            parse_err("3\n2 1\n\n\n"),
            (
                2,
                ParseErrorKind::NotAscending {
                    previous: 2,
                    successor: 1
                }
            )
        );
    }

    #[test]
    fn rejects_out_of_range_successor() {
        assert_eq!(
            parse_err("2\n\n0 2\n"),
            (
                3,
                ParseErrorKind::SuccessorOutOfRange { successor: 2, n: 2 }
            )
        );
    }

    #[test]
    fn rejects_malformed_integers() {
        assert!(matches!(
            parse_err("2\n1 x\n\n"),
            (2, ParseErrorKind::MalformedInteger(_))
        ));
        assert!(matches!(
            parse_err("2\n-1\n\n"),
            (2, ParseErrorKind::MalformedInteger(_))
        ));
        assert!(matches!(
            parse_err("two\n\n\n"),
            (1, ParseErrorKind::MalformedInteger(_))
        ));
    }

    #[test]
    fn rejects_node_count_mismatch() {
        assert_eq!(
            parse_err("3\n1\n\n"),
            (
                4,
                ParseErrorKind::NodeCountMismatch {
                    declared: 3,
                    found: 2
                }
            )
        );
        assert_eq!(
            parse_err("1\n\n\n"),
            (
                3,
                ParseErrorKind::NodeCountMismatch {
                    declared: 1,
                    found: 2
                }
            )
        );
    }

    #[test]
    fn rejects_missing_newline_and_header() {
        assert_eq!(
            parse_err("1\n0"),
            (2, ParseErrorKind::MissingTrailingNewline)
        );
        assert_eq!(parse_err(""), (1, ParseErrorKind::MissingNodeCount));
        assert_eq!(parse_err("\n"), (1, ParseErrorKind::MissingNodeCount));
        assert_eq!(parse_err("1\n\u{e9}\n"), (1, ParseErrorKind::NotText));
    }

    #[test]
    fn from_lists_validates() {
        assert!(Graph::from_lists([vec![0u32, 0]]).is_err());
        assert!(Graph::from_lists([vec![1u32]]).is_err());
        assert!(
            Graph::from_lists(Vec::<Vec<u32>>::new())
                .unwrap()
                .num_nodes()
                == 0
        );
    }
}
