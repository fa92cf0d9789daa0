//! Random-access timing.
//!
//! Draws node ids uniformly with a seeded generator, extracts each list from
//! the compressed structure and divides the total extraction time by the
//! number of successors returned. Only the query phase is timed, and each
//! query materializes its full list.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::container::CompressedGraph;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub queries: usize,
    pub seed: u64,
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            queries: 100_000,
            seed: 0,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub codec: String,
    pub queries: usize,
    pub threads: usize,
    pub seed: u64,
    pub edges_touched: u64,
    pub total: Duration,
    pub bits_per_edge: Option<f64>,
}

impl BenchReport {
    /// Microseconds per returned successor; `None` if every drawn list was
    /// empty.
    pub fn time_per_edge_us(&self) -> Option<f64> {
        (self.edges_touched > 0).then(|| self.total.as_secs_f64() * 1e6 / self.edges_touched as f64)
    }
}

/// The node ids a benchmark with `seed` queries, in order.
pub fn query_nodes(n: u64, queries: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..queries).map(|_| rng.random_range(0..n)).collect()
}

fn run_queries(cg: &CompressedGraph, nodes: &[u64]) -> Result<u64> {
    let mut edges = 0;
    for &node in nodes {
        let list = cg.successors(node)?;
        edges += list.len() as u64;
        std::hint::black_box(list);
    }
    Ok(edges)
}

pub fn run_bench(cg: &CompressedGraph, config: &BenchConfig) -> Result<BenchReport> {
    if config.queries == 0 {
        return Err(Error::InvalidParams("at least one query is needed".into()));
    }
    if cg.num_nodes() == 0 {
        return Err(Error::InvalidParams("cannot query an empty graph".into()));
    }
    let threads = config.threads.max(1);
    let nodes = query_nodes(cg.num_nodes(), config.queries, config.seed);

    let start = Instant::now();
    let edges_touched = if threads == 1 {
        run_queries(cg, &nodes)?
    } else {
        let chunk = nodes.len().div_ceil(threads);
        std::thread::scope(|s| {
            let handles: Vec<_> = nodes
                .chunks(chunk)
                .map(|part| s.spawn(move || run_queries(cg, part)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("bench worker panicked"))
                .sum::<Result<u64>>()
        })?
    };
    let total = start.elapsed();

    Ok(BenchReport {
        codec: cg.codec().label(),
        queries: config.queries,
        threads,
        seed: config.seed,
        edges_touched,
        total,
        bits_per_edge: cg.bits_per_edge(),
    })
}
