//! Query-latency sweeps over methods and error thresholds.

use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{mcsp_query, pisp_query, AliasTables};
use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::query::{query_unchecked, IndexMeta, Method, QueryResult};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub epsilons: Vec<f64>,
    pub methods: Vec<Method>,
    pub queries: usize,
    pub seed: u64,
    /// Per-query limit; a method that exceeds it is dropped for this and
    /// every smaller epsilon.
    pub timeout: Duration,
    pub p_f: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            epsilons: vec![1e-2, 1e-3],
            methods: Method::ALL.to_vec(),
            queries: 100,
            seed: 0,
            timeout: Duration::from_secs(3600),
            p_f: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub method: Method,
    pub epsilon: f64,
    pub mean_secs: f64,
    pub stddev_secs: f64,
    pub n: usize,
    pub excluded: bool,
}

/// Largest score difference seen between two methods at one epsilon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub epsilon: f64,
    pub first: Method,
    pub second: Method,
    pub max_diff: f64,
    /// `ε_first + ε_second`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub queries: Vec<usize>,
    pub cells: Vec<BenchCell>,
    pub agreements: Vec<Agreement>,
}

impl BenchReport {
    pub fn any_excluded(&self) -> bool {
        self.cells.iter().any(|c| c.excluded)
    }

    pub fn cell(&self, method: Method, epsilon: f64) -> Option<&BenchCell> {
        self.cells.iter().find(|c| c.method == method && c.epsilon == epsilon)
    }
}

/// `count` distinct U-nodes drawn uniformly, sorted.
pub fn sample_queries(g: &BipartiteGraph, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = sample(&mut rng, g.u_count(), count.min(g.u_count())).into_vec();
    picked.sort_unstable();
    picked
}

/// Runs one query with any method. `deadline` only interrupts Monte Carlo.
#[allow(clippy::too_many_arguments)]
pub fn run_method(
    method: Method,
    g: &BipartiteGraph,
    meta: &IndexMeta,
    alias: &AliasTables,
    query: usize,
    epsilon: f64,
    p_f: f64,
    seed: u64,
    deadline: Option<Instant>,
) -> Result<QueryResult> {
    match method {
        Method::SsBiPush => query_unchecked(g, meta, query, epsilon),
        Method::Mcsp => mcsp_query(g, alias, query, meta.alpha, epsilon, p_f, seed, deadline),
        Method::Pisp => pisp_query(g, query, meta.alpha, epsilon),
    }
}

pub fn run_bench(
    g: &BipartiteGraph,
    meta: &IndexMeta,
    alias: &AliasTables,
    config: &BenchConfig,
) -> Result<BenchReport> {
    meta.check(g)?;
    let queries = sample_queries(g, config.queries, config.seed);
    let mut excluded = vec![false; config.methods.len()];
    let mut cells = Vec::new();
    let mut agreements = Vec::new();

    for &epsilon in &config.epsilons {
        let mut times: Vec<Vec<f64>> = vec![Vec::new(); config.methods.len()];
        let mut diffs = vec![vec![0.0f64; config.methods.len()]; config.methods.len()];
        let was_excluded = excluded.clone();
        for (qi, &q) in queries.iter().enumerate() {
            let mut results: Vec<Option<QueryResult>> = vec![None; config.methods.len()];
            for (m, &method) in config.methods.iter().enumerate() {
                if excluded[m] {
                    continue;
                }
                let start = Instant::now();
                let seed = config.seed ^ (qi as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
                match run_method(method, g, meta, alias, q, epsilon, config.p_f, seed, Some(start + config.timeout)) {
                    Ok(r) if start.elapsed() <= config.timeout => {
                        times[m].push(start.elapsed().as_secs_f64());
                        results[m] = Some(r);
                    }
                    Ok(_) | Err(Error::Timeout(_)) => {
                        log::warn!("{method} exceeded {:?} at epsilon {epsilon}", config.timeout);
                        excluded[m] = true;
                    }
                    Err(e) => return Err(e),
                }
            }
            for a in 0..results.len() {
                for b in a + 1..results.len() {
                    if let (Some(x), Some(y)) = (&results[a], &results[b]) {
                        let d = x.scores.iter().zip(&y.scores).map(|(s, t)| (s - t).abs()).fold(0.0, f64::max);
                        diffs[a][b] = diffs[a][b].max(d);
                    }
                }
            }
        }
        for (m, &method) in config.methods.iter().enumerate() {
            let t = &times[m];
            let n = t.len();
            let mean = if n == 0 { 0.0 } else { t.iter().sum::<f64>() / n as f64 };
            let var = if n < 2 { 0.0 } else { t.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 };
            cells.push(BenchCell {
                method,
                epsilon,
                mean_secs: mean,
                stddev_secs: var.sqrt(),
                n,
                excluded: excluded[m],
            });
        }
        for a in 0..config.methods.len() {
            for b in a + 1..config.methods.len() {
                if !was_excluded[a] && !was_excluded[b] && !excluded[a] && !excluded[b] {
                    agreements.push(Agreement {
                        epsilon,
                        first: config.methods[a],
                        second: config.methods[b],
                        max_diff: diffs[a][b],
                        bound: 2.0 * epsilon,
                    });
                }
            }
        }
    }
    Ok(BenchReport { queries, cells, agreements })
}
