//! Weighted bipartite graphs stored as two mirrored compressed adjacency arrays.
//!
//! Nodes on both sides are densely indexed. Every edge `(u, v, w)` is stored
//! once in the U-side adjacency and once in the V-side adjacency. Alongside
//! the raw weights each side keeps the transition probability that the push
//! and power-iteration kernels need when reading that adjacency:
//!
//! * walking `adj_u(u)` yields `V(v, u) = w / ws(v)`, the probability that a
//!   walk standing at `v` steps to `u`;
//! * walking `adj_v(v)` yields `U(u, v) = w / ws(u)`.
//!
//! Both kernels are then pure gathers over contiguous memory.

mod cache;
mod kcore;
mod load;
mod synth;

use std::collections::HashMap;

#[cfg(test)]
pub(crate) use cache::cache_bytes;
pub use cache::{read_cache, write_cache, CACHE_MAGIC, CACHE_VERSION};
pub use kcore::k_core_filter;
pub use load::{load_edge_list, write_edge_list, LoadOptions};
pub use synth::{synth_bipartite, SynthParams, WeightRange};

use crate::error::{Error, Result};

/// Which side of the bipartition a node lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Side {
    U,
    V,
}

/// One side's compressed adjacency.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Csr {
    pub(crate) offsets: Vec<usize>,
    pub(crate) targets: Vec<u32>,
    pub(crate) weights: Vec<f64>,
    /// `weights[e] / ws(targets[e])`.
    pub(crate) probs: Vec<f64>,
}

impl Csr {
    #[inline]
    fn range(&self, node: usize) -> std::ops::Range<usize> {
        self.offsets[node]..self.offsets[node + 1]
    }

    fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }
}

/// Immutable weighted bipartite graph.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    pub(crate) u_adj: Csr,
    pub(crate) v_adj: Csr,
    ws_u: Vec<f64>,
    ws_v: Vec<f64>,
    u_labels: Vec<String>,
    v_labels: Vec<String>,
    u_index: HashMap<String, u32>,
    v_index: HashMap<String, u32>,
}

impl BipartiteGraph {
    /// Builds a graph from dense-indexed edges.
    ///
    /// Duplicate `(u, v)` pairs are merged by summing their weights. Every
    /// label must have at least one incident edge and no label may appear on
    /// both sides.
    pub fn from_edges(
        u_labels: Vec<String>,
        v_labels: Vec<String>,
        edges: impl IntoIterator<Item = (u32, u32, f64)>,
    ) -> Result<Self> {
        let u_count = u_labels.len();
        let v_count = v_labels.len();
        if u_count > u32::MAX as usize || v_count > u32::MAX as usize {
            return Err(Error::InvalidGraph("too many nodes for 32-bit indices".into()));
        }

        let mut merged: HashMap<(u32, u32), f64> = HashMap::new();
        let mut order: Vec<(u32, u32)> = Vec::new();
        for (u, v, w) in edges {
            if u as usize >= u_count {
                return Err(Error::IndexOutOfRange { index: u as usize, size: u_count });
            }
            if v as usize >= v_count {
                return Err(Error::IndexOutOfRange { index: v as usize, size: v_count });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "non-positive weight {w} on edge ({}, {})",
                    u_labels[u as usize], v_labels[v as usize]
                )));
            }
            match merged.entry((u, v)) {
                std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += w,
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(w);
                    order.push((u, v));
                }
            }
        }
        if order.is_empty() {
            return Err(Error::EmptyGraph);
        }

        let mut triples: Vec<(u32, u32, f64)> =
            order.into_iter().map(|(u, v)| (u, v, merged[&(u, v)])).collect();

        let u_adj_raw = build_side(u_count, triples.iter().map(|&(u, v, w)| (u, v, w)));
        triples.sort_unstable_by_key(|&(u, v, _)| (v, u));
        let v_adj_raw = build_side(v_count, triples.iter().map(|&(u, v, w)| (v, u, w)));

        let ws_u = weight_sums(&u_adj_raw);
        let ws_v = weight_sums(&v_adj_raw);
        if let Some(i) = ws_u.iter().position(|&s| s <= 0.0) {
            return Err(Error::InvalidGraph(format!("U-node {:?} has no edges", u_labels[i])));
        }
        if let Some(j) = ws_v.iter().position(|&s| s <= 0.0) {
            return Err(Error::InvalidGraph(format!("V-node {:?} has no edges", v_labels[j])));
        }

        let u_adj = with_probs(u_adj_raw, &ws_v);
        let v_adj = with_probs(v_adj_raw, &ws_u);

        let u_index = index_labels(&u_labels, "U")?;
        let v_index = index_labels(&v_labels, "V")?;
        if let Some(shared) = u_labels.iter().find(|l| v_index.contains_key(*l)) {
            return Err(Error::InvalidGraph(format!("label {shared:?} appears on both sides")));
        }

        Ok(Self { u_adj, v_adj, ws_u, ws_v, u_labels, v_labels, u_index, v_index })
    }

    pub fn u_count(&self) -> usize {
        self.ws_u.len()
    }

    pub fn v_count(&self) -> usize {
        self.ws_v.len()
    }

    pub fn edge_count(&self) -> usize {
        self.u_adj.targets.len()
    }

    /// Sum of weights incident to `u`.
    #[inline]
    pub fn ws_u(&self, u: usize) -> f64 {
        self.ws_u[u]
    }

    #[inline]
    pub fn ws_v(&self, v: usize) -> f64 {
        self.ws_v[v]
    }

    pub fn ws_u_all(&self) -> &[f64] {
        &self.ws_u
    }

    pub fn ws_v_all(&self) -> &[f64] {
        &self.ws_v
    }

    #[inline]
    pub fn degree_u(&self, u: usize) -> usize {
        self.u_adj.range(u).len()
    }

    #[inline]
    pub fn degree_v(&self, v: usize) -> usize {
        self.v_adj.range(v).len()
    }

    /// `(v, w(u, v))` for each neighbor of `u`, ascending by `v`.
    pub fn neighbors_u(&self, u: usize) -> impl ExactSizeIterator<Item = (usize, f64)> + '_ {
        let r = self.u_adj.range(u);
        self.u_adj.targets[r.clone()]
            .iter()
            .zip(&self.u_adj.weights[r])
            .map(|(&v, &w)| (v as usize, w))
    }

    /// `(u, w(u, v))` for each neighbor of `v`, ascending by `u`.
    pub fn neighbors_v(&self, v: usize) -> impl ExactSizeIterator<Item = (usize, f64)> + '_ {
        let r = self.v_adj.range(v);
        self.v_adj.targets[r.clone()]
            .iter()
            .zip(&self.v_adj.weights[r])
            .map(|(&u, &w)| (u as usize, w))
    }

    /// Neighbors of `u` paired with `V(v, u) = w(u, v) / ws(v)`.
    #[inline]
    pub(crate) fn u_adj_probs(&self, u: usize) -> (&[u32], &[f64]) {
        let r = self.u_adj.range(u);
        (&self.u_adj.targets[r.clone()], &self.u_adj.probs[r])
    }

    /// Neighbors of `v` paired with `U(u, v) = w(u, v) / ws(u)`.
    #[inline]
    pub(crate) fn v_adj_probs(&self, v: usize) -> (&[u32], &[f64]) {
        let r = self.v_adj.range(v);
        (&self.v_adj.targets[r.clone()], &self.v_adj.probs[r])
    }

    /// Weight of edge `(u, v)`, or 0 when absent.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        let r = self.u_adj.range(u);
        let targets = &self.u_adj.targets[r.clone()];
        match targets.binary_search(&(v as u32)) {
            Ok(pos) => self.u_adj.weights[r.start + pos],
            Err(_) => 0.0,
        }
    }

    /// Forward transition `U(u, v) = w(u, v) / ws(u)`.
    pub fn forward_prob(&self, u: usize, v: usize) -> f64 {
        self.weight(u, v) / self.ws_u[u]
    }

    /// Backward transition `V(v, u) = w(v, u) / ws(v)`.
    pub fn backward_prob(&self, v: usize, u: usize) -> f64 {
        self.weight(u, v) / self.ws_v[v]
    }

    /// Entry `P(ui, uj)` of the hidden U-to-U transition matrix `P = U·V`.
    pub fn hidden_transition_entry(&self, ui: usize, uj: usize) -> Result<f64> {
        self.check_u(ui)?;
        self.check_u(uj)?;
        let mut total = 0.0;
        for (v, w) in self.neighbors_u(ui) {
            let back = self.weight(uj, v);
            if back > 0.0 {
                total += (w / self.ws_u[ui]) * (back / self.ws_v[v]);
            }
        }
        Ok(total)
    }

    /// The full row `P(ui, ·)`, computed as a two-hop scatter.
    pub fn hidden_transition_row(&self, ui: usize) -> Result<Vec<f64>> {
        self.check_u(ui)?;
        let mut row = vec![0.0; self.u_count()];
        for (v, w) in self.neighbors_u(ui) {
            let forward = w / self.ws_u[ui];
            for (uj, w2) in self.neighbors_v(v) {
                row[uj] += forward * w2 / self.ws_v[v];
            }
        }
        Ok(row)
    }

    pub fn u_label(&self, u: usize) -> &str {
        &self.u_labels[u]
    }

    pub fn v_label(&self, v: usize) -> &str {
        &self.v_labels[v]
    }

    pub fn u_labels(&self) -> &[String] {
        &self.u_labels
    }

    pub fn v_labels(&self) -> &[String] {
        &self.v_labels
    }

    pub fn u_index_of(&self, label: &str) -> Option<usize> {
        self.u_index.get(label).map(|&i| i as usize)
    }

    pub fn v_index_of(&self, label: &str) -> Option<usize> {
        self.v_index.get(label).map(|&i| i as usize)
    }

    /// All edges as `(u, v, w)`, grouped by `u` then ascending `v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.u_count()).flat_map(move |u| self.neighbors_u(u).map(move |(v, w)| (u, v, w)))
    }

    pub fn check_u(&self, u: usize) -> Result<()> {
        if u < self.u_count() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: u, size: self.u_count() })
        }
    }

    /// Same labels on both sides with the same weighted edge set.
    pub fn same_labeled_edges(&self, other: &BipartiteGraph) -> bool {
        if self.u_count() != other.u_count()
            || self.v_count() != other.v_count()
            || self.edge_count() != other.edge_count()
        {
            return false;
        }
        self.edges().all(|(u, v, w)| {
            match (other.u_index_of(self.u_label(u)), other.v_index_of(self.v_label(v))) {
                (Some(ou), Some(ov)) => other.weight(ou, ov) == w,
                _ => false,
            }
        })
    }
}

impl PartialEq for BipartiteGraph {
    fn eq(&self, other: &Self) -> bool {
        self.u_adj == other.u_adj
            && self.v_adj == other.v_adj
            && self.u_labels == other.u_labels
            && self.v_labels == other.v_labels
    }
}

fn build_side(node_count: usize, edges: impl Iterator<Item = (u32, u32, f64)> + Clone) -> Csr {
    let mut offsets = vec![0usize; node_count + 1];
    for (src, _, _) in edges.clone() {
        offsets[src as usize + 1] += 1;
    }
    for i in 0..node_count {
        offsets[i + 1] += offsets[i];
    }
    let m = offsets[node_count];
    let mut cursor = offsets.clone();
    let mut targets = vec![0u32; m];
    let mut weights = vec![0.0; m];
    for (src, dst, w) in edges {
        let slot = cursor[src as usize];
        targets[slot] = dst;
        weights[slot] = w;
        cursor[src as usize] += 1;
    }
    for node in 0..node_count {
        let r = offsets[node]..offsets[node + 1];
        let mut pairs: Vec<(u32, f64)> =
            targets[r.clone()].iter().copied().zip(weights[r.clone()].iter().copied()).collect();
        pairs.sort_unstable_by_key(|&(t, _)| t);
        for (k, (t, w)) in pairs.into_iter().enumerate() {
            targets[r.start + k] = t;
            weights[r.start + k] = w;
        }
    }
    Csr { offsets, targets, weights, probs: Vec::new() }
}

fn weight_sums(csr: &Csr) -> Vec<f64> {
    (0..csr.node_count()).map(|n| csr.weights[csr.range(n)].iter().sum()).collect()
}

fn with_probs(mut csr: Csr, ws_other: &[f64]) -> Csr {
    csr.probs = csr
        .targets
        .iter()
        .zip(&csr.weights)
        .map(|(&t, &w)| w / ws_other[t as usize])
        .collect();
    csr
}

fn index_labels(labels: &[String], side: &str) -> Result<HashMap<String, u32>> {
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i as u32).is_some() {
            return Err(Error::InvalidGraph(format!("duplicate {side} label {l:?}")));
        }
    }
    Ok(index)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }

    pub(crate) fn build(nu: usize, nv: usize, edges: &[(u32, u32, f64)]) -> BipartiteGraph {
        BipartiteGraph::from_edges(labels("u", nu), labels("v", nv), edges.iter().copied())
            .unwrap()
    }

    /// u1–v1, u2–v1, unit weights.
    pub(crate) fn g2() -> BipartiteGraph {
        build(2, 1, &[(0, 0, 1.0), (1, 0, 1.0)])
    }

    /// u1–v1, u1–v2, u2–v2, unit weights.
    pub(crate) fn g3() -> BipartiteGraph {
        build(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)])
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g3_hidden_transition_entries() {
        // Hand expansion of P = U·V:
        // P(u1,u1) = U(u1,v1)V(v1,u1) + U(u1,v2)V(v2,u1) = 1/2·1 + 1/2·1/2 = 3/4
        // P(u1,u2) = U(u1,v2)V(v2,u2) = 1/2·1/2 = 1/4
        // P(u2,u1) = U(u2,v2)V(v2,u1) = 1·1/2 = 1/2
        // P(u2,u2) = U(u2,v2)V(v2,u2) = 1/2
        let g = g3();
        let expect = [[0.75, 0.25], [0.5, 0.5]];
        for (i, row) in expect.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                assert!((g.hidden_transition_entry(i, j).unwrap() - p).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn g2_hidden_transition_is_uniform() {
        let g = g2();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(g.hidden_transition_entry(i, j).unwrap(), 0.5);
            }
        }
        assert_eq!(g.ws_v(0), 2.0);
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        assert!(matches!(
            g2().hidden_transition_entry(0, 5),
            Err(Error::IndexOutOfRange { index: 5, .. })
        ));
    }

    #[test]
    fn isolated_node_rejected() {
        let err = BipartiteGraph::from_edges(
            vec!["a".into(), "b".into()],
            vec!["x".into()],
            [(0u32, 0u32, 1.0)],
        )
        .unwrap_err();
        assert!(err.to_string().contains("no edges"));
    }

    #[test]
    fn shared_label_rejected() {
        let err = BipartiteGraph::from_edges(vec!["a".into()], vec!["a".into()], [(0, 0, 1.0)])
            .unwrap_err();
        assert!(err.to_string().contains("both sides"));
    }

    #[test]
    fn duplicate_edges_are_merged() {
        let g = build(1, 1, &[(0, 0, 2.0), (0, 0, 3.0)]);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 0), 5.0);
    }

    fn arb_graph() -> impl Strategy<Value = BipartiteGraph> {
        (1usize..12, 1usize..12, any::<u64>()).prop_map(|(nu, nv, seed)| {
            let m = (nu.max(nv) + seed as usize % (nu * nv - nu.max(nv) + 1)).min(nu * nv);
            synth_bipartite(
                &SynthParams {
                    u_count: nu,
                    v_count: nv,
                    edge_count: m,
                    weights: WeightRange::new(0.0, 10.0).unwrap(),
                    degree_skew: None,
                },
                seed,
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn hidden_rows_sum_to_one(g in arb_graph()) {
            for ui in 0..g.u_count() {
                let s: f64 = g.hidden_transition_row(ui).unwrap().iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn hidden_transition_degree_symmetry(g in arb_graph()) {
            for ui in 0..g.u_count() {
                for uj in 0..g.u_count() {
                    let a = g.hidden_transition_entry(ui, uj).unwrap() / g.ws_u(uj);
                    let b = g.hidden_transition_entry(uj, ui).unwrap() / g.ws_u(ui);
                    prop_assert!((a - b).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn adjacency_mirrors_and_weight_sums(g in arb_graph()) {
            for (u, v, w) in g.edges() {
                prop_assert!(w > 0.0);
                prop_assert!(g.neighbors_v(v).any(|(uu, ww)| uu == u && ww == w));
            }
            for u in 0..g.u_count() {
                let s: f64 = g.neighbors_u(u).map(|(_, w)| w).sum();
                prop_assert_eq!(s, g.ws_u(u));
                let row: f64 = g.neighbors_u(u).map(|(v, _)| g.forward_prob(u, v)).sum();
                prop_assert!((row - 1.0).abs() < 1e-12);
            }
            for v in 0..g.v_count() {
                prop_assert!(g.degree_v(v) >= 1);
                let row: f64 = g.neighbors_v(v).map(|(u, _)| g.backward_prob(v, u)).sum();
                prop_assert!((row - 1.0).abs() < 1e-12);
            }
        }
    }
}
