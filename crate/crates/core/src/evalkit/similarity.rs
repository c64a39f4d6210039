use crate::error::Result;
use crate::graph::BipartiteGraph;
use crate::oracle::{exact_bhpp, DenseHpp};
use crate::push::power_iteration;
use crate::query::{query_unchecked, IndexMeta};

/// Similarity of one U-node to every U-node.
pub trait Similarity: Sync {
    fn name(&self) -> &str;
    fn row(&self, u: usize) -> Result<Vec<f64>>;
}

/// Approximate BHPP at a fixed `epsilon`.
pub struct BhppSimilarity<'a> {
    pub graph: &'a BipartiteGraph,
    pub meta: IndexMeta,
    pub epsilon: f64,
}

impl<'a> BhppSimilarity<'a> {
    pub fn new(graph: &'a BipartiteGraph, alpha: f64, epsilon: f64) -> Result<Self> {
        Ok(Self { graph, meta: IndexMeta::build(graph, alpha)?, epsilon })
    }
}

impl Similarity for BhppSimilarity<'_> {
    fn name(&self) -> &str {
        "bhpp"
    }

    fn row(&self, u: usize) -> Result<Vec<f64>> {
        Ok(query_unchecked(self.graph, &self.meta, u, self.epsilon)?.scores)
    }
}

/// Jaccard overlap of unweighted V-neighborhoods.
pub struct Jaccard<'a> {
    pub graph: &'a BipartiteGraph,
}

impl Similarity for Jaccard<'_> {
    fn name(&self) -> &str {
        "jaccard"
    }

    fn row(&self, u: usize) -> Result<Vec<f64>> {
        let g = self.graph;
        g.check_u(u)?;
        let mut common = vec![0usize; g.u_count()];
        for (v, _) in g.neighbors_u(u) {
            for (x, _) in g.neighbors_v(v) {
                common[x] += 1;
            }
        }
        let du = g.degree_u(u);
        Ok(common
            .iter()
            .enumerate()
            .map(|(x, &c)| if c == 0 { 0.0 } else { c as f64 / (du + g.degree_u(x) - c) as f64 })
            .collect())
    }
}

/// One-directional HPP `π(u, ·)` by truncated power iteration.
pub struct NaivePpr<'a> {
    pub graph: &'a BipartiteGraph,
    pub alpha: f64,
    pub iterations: usize,
}

impl Similarity for NaivePpr<'_> {
    fn name(&self) -> &str {
        "ppr"
    }

    fn row(&self, u: usize) -> Result<Vec<f64>> {
        self.graph.check_u(u)?;
        let mut e = vec![0.0; self.graph.u_count()];
        e[u] = 1.0;
        Ok(power_iteration(self.graph, &e, self.alpha, self.iterations))
    }
}

/// Exact BHPP from the dense oracle.
pub struct ExactBhpp {
    pub dense: DenseHpp,
}

impl Similarity for ExactBhpp {
    fn name(&self) -> &str {
        "exact"
    }

    fn row(&self, u: usize) -> Result<Vec<f64>> {
        Ok(exact_bhpp(&self.dense, u))
    }
}
