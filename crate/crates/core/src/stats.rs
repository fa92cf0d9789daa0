//! Summary statistics of plain and compressed graphs.

use crate::container::{Codec, CompressedGraph};
use crate::error::Result;
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq)]
pub struct GraphStats {
    pub nodes: u64,
    pub edges: u64,
    pub empty_lists: u64,
    pub longest_list: usize,
}

impl GraphStats {
    pub fn of(g: &Graph) -> Self {
        let mut empty_lists = 0;
        let mut longest_list = 0;
        for list in g.lists() {
            empty_lists += u64::from(list.is_empty());
            longest_list = longest_list.max(list.len());
        }
        GraphStats {
            nodes: g.num_nodes() as u64,
            edges: g.num_edges(),
            empty_lists,
            longest_list,
        }
    }

    pub fn edges_per_node(&self) -> f64 {
        if self.nodes == 0 {
            0.0
        } else {
            self.edges as f64 / self.nodes as f64
        }
    }

    /// Percentage of nodes without successors.
    pub fn empty_percent(&self) -> f64 {
        if self.nodes == 0 {
            0.0
        } else {
            100.0 * self.empty_lists as f64 / self.nodes as f64
        }
    }
}

/// Flag-window counts over all blocks of an LM container.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WindowStats {
    pub windows: u64,
    pub single_bit: u64,
    pub set_bits: u64,
}

impl WindowStats {
    /// Fraction of windows with exactly one set bit.
    pub fn single_bit_share(&self) -> Option<f64> {
        (self.windows > 0).then(|| self.single_bit as f64 / self.windows as f64)
    }

    /// Returns `None` for non-LM containers.
    pub fn of(cg: &CompressedGraph) -> Result<Option<Self>> {
        if !matches!(cg.codec(), Codec::Lm(_)) {
            return Ok(None);
        }
        let mut stats = WindowStats::default();
        for k in 0..cg.num_blocks() {
            let (_, windows) = cg.lm_block(k)?;
            for w in windows.windows() {
                let ones: u32 = w.iter().map(|b| b.count_ones()).sum();
                stats.windows += 1;
                stats.single_bit += u64::from(ones == 1);
                stats.set_bits += u64::from(ones);
            }
        }
        Ok(Some(stats))
    }
}
