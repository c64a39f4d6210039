use std::collections::VecDeque;

use super::BipartiteGraph;
use crate::error::{Error, Result};

/// Repeatedly removes nodes of degree `< k` on either side until none remain,
/// then re-indexes the survivors, keeping their relative order.
pub fn k_core_filter(g: &BipartiteGraph, k: usize) -> Result<BipartiteGraph> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let (nu, nv) = (g.u_count(), g.v_count());
    let mut deg_u: Vec<usize> = (0..nu).map(|u| g.degree_u(u)).collect();
    let mut deg_v: Vec<usize> = (0..nv).map(|v| g.degree_v(v)).collect();
    let mut alive_u = vec![true; nu];
    let mut alive_v = vec![true; nv];

    // Queue entries are (is_u, index).
    let mut queue: VecDeque<(bool, usize)> = VecDeque::new();
    for u in 0..nu {
        if deg_u[u] < k {
            alive_u[u] = false;
            queue.push_back((true, u));
        }
    }
    for v in 0..nv {
        if deg_v[v] < k {
            alive_v[v] = false;
            queue.push_back((false, v));
        }
    }
    while let Some((is_u, node)) = queue.pop_front() {
        if is_u {
            for (v, _) in g.neighbors_u(node) {
                if alive_v[v] {
                    deg_v[v] -= 1;
                    if deg_v[v] < k {
                        alive_v[v] = false;
                        queue.push_back((false, v));
                    }
                }
            }
        } else {
            for (u, _) in g.neighbors_v(node) {
                if alive_u[u] {
                    deg_u[u] -= 1;
                    if deg_u[u] < k {
                        alive_u[u] = false;
                        queue.push_back((true, u));
                    }
                }
            }
        }
    }

    let remap = |alive: &[bool]| -> Vec<Option<u32>> {
        let mut next = 0u32;
        alive
            .iter()
            .map(|&a| {
                a.then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let new_u = remap(&alive_u);
    let new_v = remap(&alive_v);
    let u_labels: Vec<String> =
        (0..nu).filter(|&u| alive_u[u]).map(|u| g.u_label(u).to_string()).collect();
    let v_labels: Vec<String> =
        (0..nv).filter(|&v| alive_v[v]).map(|v| g.v_label(v).to_string()).collect();
    if u_labels.is_empty() || v_labels.is_empty() {
        return Err(Error::EmptyCore { k });
    }
    let edges: Vec<(u32, u32, f64)> = g
        .edges()
        .filter_map(|(u, v, w)| Some((new_u[u]?, new_v[v]?, w)))
        .collect();
    BipartiteGraph::from_edges(u_labels, v_labels, edges)
}
