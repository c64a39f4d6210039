use rand::Rng;

use crate::graph::{BipartiteGraph, Csr};

/// Vose alias tables laid out parallel to one side's adjacency array.
#[derive(Debug, Clone)]
struct SideAlias {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    /// Probability of keeping the slot's own target.
    keep: Vec<f64>,
    /// Position within the node's adjacency to take otherwise.
    alias: Vec<u32>,
}

/// O(1) weighted neighbor sampling on both sides of a graph.
#[derive(Debug, Clone)]
pub struct AliasTables {
    u_side: SideAlias,
    v_side: SideAlias,
}

pub fn build_alias(g: &BipartiteGraph) -> AliasTables {
    AliasTables { u_side: SideAlias::build(&g.u_adj), v_side: SideAlias::build(&g.v_adj) }
}

impl AliasTables {
    /// A V-neighbor of `u` drawn with probability `w(u, v) / ws(u)`.
    #[inline]
    pub fn sample_from_u<R: Rng + ?Sized>(&self, u: usize, rng: &mut R) -> usize {
        self.u_side.sample(u, rng)
    }

    /// A U-neighbor of `v` drawn with probability `w(u, v) / ws(v)`.
    #[inline]
    pub fn sample_from_v<R: Rng + ?Sized>(&self, v: usize, rng: &mut R) -> usize {
        self.v_side.sample(v, rng)
    }

    /// `(keep, alias)` rows for a U-node, for inspection.
    pub fn u_table(&self, u: usize) -> (&[f64], &[u32]) {
        let r = self.u_side.offsets[u]..self.u_side.offsets[u + 1];
        (&self.u_side.keep[r.clone()], &self.u_side.alias[r])
    }
}

impl SideAlias {
    fn build(adj: &Csr) -> Self {
        let m = adj.targets.len();
        let mut keep = vec![1.0; m];
        let mut alias = vec![0u32; m];
        let mut small = Vec::new();
        let mut large = Vec::new();
        for node in 0..adj.offsets.len() - 1 {
            let (lo, hi) = (adj.offsets[node], adj.offsets[node + 1]);
            let d = hi - lo;
            let total: f64 = adj.weights[lo..hi].iter().sum();
            small.clear();
            large.clear();
            for i in 0..d {
                alias[lo + i] = i as u32;
                keep[lo + i] = adj.weights[lo + i] * d as f64 / total;
                if keep[lo + i] < 1.0 {
                    small.push(i);
                } else {
                    large.push(i);
                }
            }
            while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
                small.pop();
                alias[lo + s] = l as u32;
                keep[lo + l] -= 1.0 - keep[lo + s];
                if keep[lo + l] < 1.0 {
                    large.pop();
                    small.push(l);
                }
            }
            // Leftovers are 1 up to rounding.
            for &i in large.iter().chain(&small) {
                keep[lo + i] = 1.0;
            }
        }
        Self { offsets: adj.offsets.clone(), targets: adj.targets.clone(), keep, alias }
    }

    #[inline]
    fn sample<R: Rng + ?Sized>(&self, node: usize, rng: &mut R) -> usize {
        let lo = self.offsets[node];
        let d = self.offsets[node + 1] - lo;
        let slot = lo + rng.gen_range(0..d);
        let pick = if rng.gen::<f64>() < self.keep[slot] { slot } else { lo + self.alias[slot] as usize };
        self.targets[pick] as usize
    }
}
