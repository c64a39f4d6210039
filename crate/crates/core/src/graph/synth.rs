use std::collections::HashSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BipartiteGraph;
use crate::error::{Error, Result};

/// Edge weights drawn uniformly from `(low, high]`, or the constant `high`
/// when `low == high`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightRange {
    low: f64,
    high: f64,
}

impl WeightRange {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite() && low >= 0.0 && high > 0.0 && low <= high) {
            return Err(Error::InvalidParameter(format!("bad weight range ({low}, {high}]")));
        }
        Ok(Self { low, high })
    }

    pub fn constant(w: f64) -> Result<Self> {
        Self::new(w, w)
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.low == self.high {
            return self.high;
        }
        // 1 - [0,1) lies in (0,1], so the draw lands in (low, high].
        let x = 1.0 - rng.gen::<f64>();
        self.low + (self.high - self.low) * x
    }
}

#[derive(Debug, Clone)]
pub struct SynthParams {
    pub u_count: usize,
    pub v_count: usize,
    pub edge_count: usize,
    pub weights: WeightRange,
    /// Power-law exponent `s`: the node of popularity rank `r` is picked with
    /// probability proportional to `(r + 1)^-s`. `None` picks uniformly.
    pub degree_skew: Option<f64>,
}

/// Generates a random bipartite graph where every node has degree at least 1.
///
/// A random matching-like cover first gives every node one edge; the rest are
/// sampled without replacement. Output is a pure function of `(params, seed)`.
pub fn synth_bipartite(params: &SynthParams, seed: u64) -> Result<BipartiteGraph> {
    let (nu, nv, m) = (params.u_count, params.v_count, params.edge_count);
    if nu == 0 || nv == 0 {
        return Err(Error::InvalidParameter("both sides need at least one node".into()));
    }
    if m < nu.max(nv) {
        return Err(Error::InvalidParameter(format!(
            "{m} edges cannot cover {nu} U-nodes and {nv} V-nodes"
        )));
    }
    if (m as u128) > (nu as u128) * (nv as u128) {
        return Err(Error::InvalidParameter(format!("{m} edges exceed |U|·|V| = {}", nu * nv)));
    }
    if let Some(s) = params.degree_skew {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::InvalidParameter(format!("bad degree skew {s}")));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm_u: Vec<u32> = (0..nu as u32).collect();
    let mut perm_v: Vec<u32> = (0..nv as u32).collect();
    perm_u.shuffle(&mut rng);
    perm_v.shuffle(&mut rng);

    let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(m);
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(m);
    for i in 0..nu.max(nv) {
        let pair = (perm_u[i % nu], perm_v[i % nv]);
        seen.insert(pair);
        pairs.push(pair);
    }

    let remaining = m - pairs.len();
    let free = nu * nv - pairs.len();
    if remaining > 0 && remaining * 2 > free {
        // Dense request: enumerate the complement instead of rejection sampling.
        let mut missing: Vec<(u32, u32)> = (0..nu as u32)
            .flat_map(|u| (0..nv as u32).map(move |v| (u, v)))
            .filter(|p| !seen.contains(p))
            .collect();
        missing.shuffle(&mut rng);
        pairs.extend_from_slice(&missing[..remaining]);
    } else if remaining > 0 {
        let pick_u = popularity(nu, params.degree_skew)?;
        let pick_v = popularity(nv, params.degree_skew)?;
        while pairs.len() < m {
            let pair = (perm_u[pick_u.sample(&mut rng)], perm_v[pick_v.sample(&mut rng)]);
            if seen.insert(pair) {
                pairs.push(pair);
            }
        }
    }

    let edges: Vec<(u32, u32, f64)> =
        pairs.into_iter().map(|(u, v)| (u, v, params.weights.sample(&mut rng))).collect();
    BipartiteGraph::from_edges(
        (0..nu).map(|i| format!("u{i}")).collect(),
        (0..nv).map(|i| format!("v{i}")).collect(),
        edges,
    )
}

fn popularity(n: usize, skew: Option<f64>) -> Result<WeightedIndex<f64>> {
    let s = skew.unwrap_or(0.0);
    WeightedIndex::new((0..n).map(|r| ((r + 1) as f64).powf(-s)))
        .map_err(|e| Error::InvalidParameter(format!("degree skew: {e}")))
}
