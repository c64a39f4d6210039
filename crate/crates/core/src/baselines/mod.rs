//! Comparison methods: Monte Carlo walks and the two composite baselines
//! that pair a forward estimator with plain selective backward push.

mod alias;
mod monte_carlo;

use std::time::Instant;

pub use alias::{build_alias, AliasTables};
pub use monte_carlo::{mc_walk_count, monte_carlo, walk_counts};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::push::{power_iteration, required_iterations, selective_push, PhaseTrace};
use crate::query::{Method, PhaseTiming, QueryResult};

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

/// Monte Carlo for `π(query, ·)` at `ε/2` plus selective push for
/// `π(·, query)` at `ε/2`. The bound holds with probability `1 − p_f`.
#[allow(clippy::too_many_arguments)]
pub fn mcsp_query(
    g: &BipartiteGraph,
    alias: &AliasTables,
    query: usize,
    alpha: f64,
    epsilon: f64,
    p_f: f64,
    seed: u64,
    deadline: Option<Instant>,
) -> Result<QueryResult> {
    check_epsilon(epsilon)?;
    let half = epsilon / 2.0;
    let start = Instant::now();
    let forward = monte_carlo(g, alias, query, alpha, half, p_f, seed, deadline)?;
    let forward_done = Instant::now();
    let backward = selective_push(g, query, alpha, half);
    let end = Instant::now();
    let scores = forward.iter().zip(backward.estimate()).map(|(f, b)| f + b).collect();
    Ok(QueryResult {
        query,
        method: Method::Mcsp,
        scores,
        epsilon,
        epsilon_b: half,
        epsilon_f: half,
        timing: PhaseTiming { forward: forward_done - start, backward: end - forward_done, total: end - start },
        backward: backward.trace,
        forward: PhaseTrace::default(),
        gamma: None,
    })
}

/// Truncated power iteration for `π(query, ·)` plus selective push for
/// `π(·, query)`, each at `ε/2`. Deterministic.
pub fn pisp_query(g: &BipartiteGraph, query: usize, alpha: f64, epsilon: f64) -> Result<QueryResult> {
    g.check_u(query)?;
    check_epsilon(epsilon)?;
    let half = epsilon / 2.0;
    let start = Instant::now();
    let t = required_iterations(alpha, half, 1.0);
    let mut e = vec![0.0; g.u_count()];
    e[query] = 1.0;
    let forward = power_iteration(g, &e, alpha, t);
    let forward_done = Instant::now();
    let backward = selective_push(g, query, alpha, half);
    let end = Instant::now();
    let scores = forward.iter().zip(backward.estimate()).map(|(f, b)| f + b).collect();
    Ok(QueryResult {
        query,
        method: Method::Pisp,
        scores,
        epsilon,
        epsilon_b: half,
        epsilon_f: half,
        timing: PhaseTiming { forward: forward_done - start, backward: end - forward_done, total: end - start },
        backward: backward.trace,
        forward: PhaseTrace { power_iterations: t as u64, ..PhaseTrace::default() },
        gamma: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::g2;
    use crate::oracle::{exact_bhpp, exact_hpp};
    use crate::testutil::random_graph;

    #[test]
    fn pisp_iteration_count() {
        let r = pisp_query(&g2(), 0, 0.15, 0.2).unwrap();
        assert_eq!(r.forward.power_iterations, 14);
    }

    #[test]
    fn pisp_g2_closed_form() {
        let r = pisp_query(&g2(), 0, 0.15, 1e-6).unwrap();
        assert!((r.scores[0] - 1.15).abs() <= 1e-6 && (r.scores[1] - 0.85).abs() <= 1e-6);
    }

    #[test]
    fn pisp_bound_on_random_graphs() {
        for seed in 0..10 {
            let g = random_graph(50, 100, 1000 + seed);
            let d = exact_hpp(&g, 0.15, 1e-15).unwrap();
            let u = seed as usize % g.u_count();
            let truth = exact_bhpp(&d, u);
            for eps in [1e-2, 1e-5] {
                let r = pisp_query(&g, u, 0.15, eps).unwrap();
                for (t, s) in truth.iter().zip(&r.scores) {
                    assert!((-1e-9..=eps).contains(&(t - s)));
                }
            }
        }
    }

    #[test]
    fn mcsp_g2_and_alpha_one() {
        let g = g2();
        let a = build_alias(&g);
        let r = mcsp_query(&g, &a, 0, 0.15, 1e-2, 1e-6, 11, None).unwrap();
        assert!((r.scores[0] - 1.15).abs() <= 1e-2 && (r.scores[1] - 0.85).abs() <= 1e-2);
        let again = mcsp_query(&g, &a, 0, 0.15, 1e-2, 1e-6, 11, None).unwrap();
        assert_eq!(r.scores, again.scores);
        let stay = mcsp_query(&g, &a, 1, 1.0, 1e-2, 1e-6, 3, None).unwrap();
        assert_eq!(stay.scores, vec![0.0, 2.0]);
    }
}
