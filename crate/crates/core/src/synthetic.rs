//! Deterministic generator for web-like test graphs.
//!
//! Each node draws a target out-degree from a geometric distribution with the
//! requested mean. With probability `copy_prob` the list starts from a random
//! subset of the previous node's list; the remaining targets land in the
//! window `[i - window, i + window]` with probability `locality` and anywhere
//! in `[0, n)` otherwise.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::graph::{Graph, GraphBuilder, NodeId};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticParams {
    pub n: usize,
    pub mean_degree: f64,
    pub locality: f64,
    pub copy_prob: f64,
    pub window: usize,
    pub seed: u64,
}

impl SyntheticParams {
    /// Similarity-rich defaults: mean degree 20, 80% local links, half the
    /// lists seeded from their predecessor.
    pub fn web_like(n: usize, seed: u64) -> Self {
        SyntheticParams {
            n,
            mean_degree: 20.0,
            locality: 0.8,
            copy_prob: 0.5,
            window: 16,
            seed,
        }
    }

    pub fn generate(&self) -> Graph {
        generate_synthetic(
            self.n,
            self.mean_degree,
            self.locality,
            self.copy_prob,
            self.window,
            self.seed,
        )
    }
}

pub fn generate_synthetic(
    n: usize,
    mean_degree: f64,
    locality: f64,
    copy_prob: f64,
    window: usize,
    seed: u64,
) -> Graph {
    assert!(n >= 1, "synthetic graphs need at least one node");
    assert!(n <= NodeId::MAX as usize, "too many nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = if mean_degree.is_finite() {
        mean_degree.max(0.0)
    } else {
        0.0
    };
    let degrees = Geometric::new(1.0 / (mean + 1.0)).expect("probability in (0, 1]");
    let locality = locality.clamp(0.0, 1.0);
    let copy_prob = copy_prob.clamp(0.0, 1.0);

    let mut builder = GraphBuilder::with_capacity(n, (n as f64 * mean) as usize);
    let mut prev: Vec<NodeId> = Vec::new();
    let mut current = BTreeSet::new();
    for i in 0..n {
        let degree = degrees.sample(&mut rng).min(n as u64) as usize;
        current.clear();

        if !prev.is_empty() && rng.random_bool(copy_prob) {
            for &v in &prev {
                if rng.random_bool(0.5) {
                    current.insert(v);
                }
            }
            // Drop random survivors until the copied part fits the degree.
            while current.len() > degree {
                let k = rng.random_range(0..current.len());
                let v = *current.iter().nth(k).unwrap();
                current.remove(&v);
            }
        }

        let lo = i.saturating_sub(window);
        let hi = (i + window).min(n - 1);
        let mut attempts = 4 * degree + 32;
        while current.len() < degree && attempts > 0 {
            attempts -= 1;
            let v = if rng.random_bool(locality) {
                rng.random_range(lo..=hi)
            } else {
                rng.random_range(0..n)
            };
            current.insert(v as NodeId);
        }

        prev.clear();
        prev.extend(current.iter().copied());
        builder.push_list(&prev);
    }
    builder.finish()
}
