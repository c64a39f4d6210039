use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::alias::AliasTables;
use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

/// Walks simulated per RNG stream.
const BATCH: u64 = 1 << 12;

/// Walks needed for additive error `epsilon_f` on every node with
/// probability at least `1 − p_f`; never less than one.
pub fn mc_walk_count(epsilon_f: f64, p_f: f64, u_count: usize) -> u64 {
    assert!(epsilon_f > 0.0 && p_f > 0.0 && u_count > 0, "walk count inputs must be positive");
    let raw = 2.0 * (1.0 + epsilon_f / 3.0) * (u_count as f64 / p_f).ln() / (epsilon_f * epsilon_f);
    (raw.ceil() as u64).max(1)
}

/// End-node counts of `walks` random walks with restart from `source`.
///
/// Batch `b` draws from stream `b` of a ChaCha8 generator keyed by `seed`,
/// so the counts do not depend on thread scheduling. Fails with
/// [`Error::Timeout`] once `deadline` passes.
pub fn walk_counts(
    g: &BipartiteGraph,
    alias: &AliasTables,
    source: usize,
    alpha: f64,
    walks: u64,
    seed: u64,
    deadline: Option<Instant>,
) -> Result<Vec<u64>> {
    g.check_u(source)?;
    let started = Instant::now();
    let batches = walks.div_ceil(BATCH);
    let n = g.u_count();
    (0..batches)
        .into_par_iter()
        .try_fold(
            || vec![0u64; n],
            |mut counts, b| {
                if deadline.is_some_and(|d| Instant::now() >= d) {
                    return Err(Error::Timeout(started.elapsed()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(b);
                let len = BATCH.min(walks - b * BATCH);
                for _ in 0..len {
                    counts[walk(alias, source, alpha, &mut rng)] += 1;
                }
                Ok(counts)
            },
        )
        .try_reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )
}

/// One walk; the stop test comes before each hidden step.
#[inline]
fn walk<R: Rng>(alias: &AliasTables, mut u: usize, alpha: f64, rng: &mut R) -> usize {
    while rng.gen::<f64>() >= alpha {
        let v = alias.sample_from_u(u, rng);
        u = alias.sample_from_v(v, rng);
    }
    u
}

/// Monte Carlo estimate of `π(source, ·)`: the fraction of walks ending at
/// each node.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo(
    g: &BipartiteGraph,
    alias: &AliasTables,
    source: usize,
    alpha: f64,
    epsilon_f: f64,
    p_f: f64,
    seed: u64,
    deadline: Option<Instant>,
) -> Result<Vec<f64>> {
    let walks = mc_walk_count(epsilon_f, p_f, g.u_count());
    let counts = walk_counts(g, alias, source, alpha, walks, seed, deadline)?;
    Ok(counts.into_iter().map(|c| c as f64 / walks as f64).collect())
}
