use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitOptions {
    /// Fraction of each node's edges to hold out.
    pub holdout_ratio: f64,
    /// Side whose nodes the holdout is stratified over.
    pub side: Side,
    /// Sampled non-edges per V-node candidate list.
    pub negatives: usize,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self { holdout_ratio: 0.2, side: Side::U, negatives: 100 }
    }
}

/// Train/test partition of a graph's edges. Node indices in `train` match
/// the original graph.
#[derive(Debug, Clone)]
pub struct EvalSplit {
    pub train: BipartiteGraph,
    /// Held-out `(u, v, w)` edges.
    pub test: Vec<(usize, usize, f64)>,
    /// Per V-node: its held-out U-neighbors followed by sampled U-nodes that
    /// appear in the test set but are not its neighbors. Empty for V-nodes
    /// with nothing held out.
    pub candidates: Vec<Vec<usize>>,
}

impl EvalSplit {
    /// Held-out U-neighbors of `v`.
    pub fn test_items(&self, v: usize) -> HashSet<usize> {
        self.test.iter().filter(|e| e.1 == v).map(|e| e.0).collect()
    }
}

/// Holds out `⌊ratio·d⌋` edges of every node on `options.side`, never
/// leaving any node without a training edge.
///
/// Nodes whose every removable edge would isolate a neighbor keep those
/// edges, so a node can lose fewer than `⌊ratio·d⌋`.
pub fn split_edges(g: &BipartiteGraph, options: &SplitOptions, seed: u64) -> Result<EvalSplit> {
    let ratio = options.holdout_ratio;
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::InvalidParameter(format!("holdout ratio must lie in [0, 1), got {ratio}")));
    }
    let (count, degree): (usize, fn(&BipartiteGraph, usize) -> usize) = match options.side {
        Side::U => (g.u_count(), BipartiteGraph::degree_u),
        Side::V => (g.v_count(), BipartiteGraph::degree_v),
    };
    for node in 0..count {
        if degree(g, node) < 2 {
            let label = match options.side {
                Side::U => g.u_label(node),
                Side::V => g.v_label(node),
            };
            return Err(Error::SplitInfeasible { node: label.to_string(), degree: degree(g, node) });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut left_u: Vec<usize> = (0..g.u_count()).map(|u| g.degree_u(u)).collect();
    let mut left_v: Vec<usize> = (0..g.v_count()).map(|v| g.degree_v(v)).collect();
    let mut held: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut order: Vec<usize> = (0..count).collect();
    order.shuffle(&mut rng);
    for node in order {
        let mut edges: Vec<(usize, usize)> = match options.side {
            Side::U => g.neighbors_u(node).map(|(v, _)| (node, v)).collect(),
            Side::V => g.neighbors_v(node).map(|(u, _)| (u, node)).collect(),
        };
        let want = (ratio * edges.len() as f64).floor() as usize;
        edges.shuffle(&mut rng);
        let mut taken = 0;
        for (u, v) in edges {
            if taken == want {
                break;
            }
            if left_u[u] > 1 && left_v[v] > 1 && !held.contains(&(u, v)) {
                left_u[u] -= 1;
                left_v[v] -= 1;
                held.insert((u, v));
                taken += 1;
            }
        }
    }

    let mut train = Vec::with_capacity(g.edge_count() - held.len());
    let mut test = Vec::with_capacity(held.len());
    for (u, v, w) in g.edges() {
        if held.contains(&(u, v)) {
            test.push((u, v, w));
        } else {
            train.push((u as u32, v as u32, w));
        }
    }
    let train = BipartiteGraph::from_edges(g.u_labels().to_vec(), g.v_labels().to_vec(), train)?;
    let candidates = sample_candidates(g, &test, options.negatives, &mut rng);
    Ok(EvalSplit { train, test, candidates })
}

fn sample_candidates(
    g: &BipartiteGraph,
    test: &[(usize, usize, f64)],
    negatives: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let pool: Vec<usize> = test.iter().map(|e| e.0).collect::<BTreeSet<_>>().into_iter().collect();
    let mut lists = vec![Vec::new(); g.v_count()];
    for &(u, v, _) in test {
        lists[v].push(u);
    }
    for (v, list) in lists.iter_mut().enumerate() {
        if list.is_empty() {
            continue;
        }
        let mut outside: Vec<usize> = pool.iter().copied().filter(|&u| g.weight(u, v) == 0.0).collect();
        outside.shuffle(rng);
        outside.truncate(negatives);
        list.extend(outside);
    }
    lists
}
