//! End-to-end BHPP queries: preprocessing metadata, the two-phase query and
//! top-k extraction.

use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::push::{pi_push, power_iteration, required_iterations, ss_push, PhaseTrace};

/// Bumped whenever the metadata layout changes.
pub const META_VERSION: u32 = 1;

/// Which algorithm produced a [`QueryResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    SsBiPush,
    Mcsp,
    Pisp,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::SsBiPush, Method::Mcsp, Method::Pisp];

    pub fn name(self) -> &'static str {
        match self {
            Method::SsBiPush => "ssbipush",
            Method::Mcsp => "mcsp",
            Method::Pisp => "pisp",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

/// How a query's error budget `ε` is split into backward `ε_b` and
/// forward `ε_f = ε − ε_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EpsSplit {
    /// `ε_b = ε(1−μ)/(2−μ)`, clamped into `[ε/10, ε/2]`.
    Balanced { mu: f64 },
    /// `ε_b = fraction·ε`.
    Fraction { fraction: f64 },
}

impl EpsSplit {
    pub fn epsilon_b(&self, epsilon: f64) -> f64 {
        match *self {
            EpsSplit::Balanced { mu } => choose_eps_b(epsilon, mu),
            EpsSplit::Fraction { fraction } => fraction * epsilon,
        }
    }
}

/// Per-graph constants fixed once at preprocessing time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexMeta {
    pub version: u32,
    pub alpha: f64,
    /// Upper bound on every column sum of the HPP matrix.
    pub lambda: f64,
    /// Power iterations spent estimating `lambda`.
    pub tau: usize,
    pub mu: f64,
    pub eps_split: EpsSplit,
    pub graph_fingerprint: String,
}

impl IndexMeta {
    pub fn build(g: &BipartiteGraph, alpha: f64) -> Result<Self> {
        Self::build_with_tau(g, alpha, default_tau(g.u_count(), alpha))
    }

    pub fn build_with_tau(g: &BipartiteGraph, alpha: f64, tau: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        let mu = estimate_mu(g);
        Ok(Self {
            version: META_VERSION,
            alpha,
            lambda: estimate_lambda(g, alpha, tau),
            tau,
            mu,
            eps_split: EpsSplit::Balanced { mu },
            graph_fingerprint: g.fingerprint(),
        })
    }

    pub fn epsilon_b(&self, epsilon: f64) -> f64 {
        self.eps_split.epsilon_b(epsilon)
    }

    /// Fails unless this metadata was built for `g`.
    pub fn check(&self, g: &BipartiteGraph) -> Result<()> {
        let actual = g.fingerprint();
        if actual != self.graph_fingerprint {
            return Err(Error::FingerprintMismatch { expected: self.graph_fingerprint.clone(), actual });
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let meta: Self = serde_json::from_reader(std::io::BufReader::new(file))?;
        if meta.version != META_VERSION {
            return Err(Error::Cache {
                path: path.to_path_buf(),
                message: format!("metadata version {} (expected {META_VERSION})", meta.version),
            });
        }
        Ok(meta)
    }
}

/// Smallest `τ` with `|U|·(1−α)^{τ+1} ≤ 0.05`.
pub fn default_tau(u_count: usize, alpha: f64) -> usize {
    required_iterations(alpha, 0.05, u_count as f64)
}

/// The two candidate bounds on the maximum HPP column sum: the power
/// iteration estimate plus its truncation slack, and the weighted degree
/// ratio `max ws / min ws`.
pub fn lambda_operands(g: &BipartiteGraph, alpha: f64, tau: usize) -> (f64, f64) {
    let n = g.u_count();
    let rho = power_iteration(g, &vec![1.0; n], alpha, tau);
    let max_rho = rho.iter().copied().fold(0.0, f64::max);
    let slack = n as f64 * (1.0 - alpha).powi(tau as i32 + 1);
    let ws = g.ws_u_all();
    let hi = ws.iter().copied().fold(0.0, f64::max);
    let lo = ws.iter().copied().fold(f64::INFINITY, f64::min);
    (max_rho + slack, hi / lo)
}

pub fn estimate_lambda(g: &BipartiteGraph, alpha: f64, tau: usize) -> f64 {
    let (iterated, ratio) = lambda_operands(g, alpha, tau);
    iterated.min(ratio)
}

/// `√(|U||V|)/|E|` clamped into `[1e-3, 1]`.
pub fn estimate_mu(g: &BipartiteGraph) -> f64 {
    let raw = (g.u_count() as f64 * g.v_count() as f64).sqrt() / g.edge_count() as f64;
    raw.clamp(1e-3, 1.0)
}

pub fn choose_eps_b(epsilon: f64, mu: f64) -> f64 {
    let raw = epsilon * (1.0 - mu) / (2.0 - mu);
    raw.clamp(epsilon / 10.0, epsilon / 2.0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTiming {
    pub backward: Duration,
    pub forward: Duration,
    pub total: Duration,
}

/// Approximate BHPP scores `β′(query, ·)` from one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub query: usize,
    pub method: Method,
    pub scores: Vec<f64>,
    pub epsilon: f64,
    pub epsilon_b: f64,
    pub epsilon_f: f64,
    pub timing: PhaseTiming,
    pub backward: PhaseTrace,
    pub forward: PhaseTrace,
    /// Degree-weighted residue mass handed to the forward phase.
    pub gamma: Option<f64>,
}

impl QueryResult {
    /// Indices ranked by descending score, ties by ascending index.
    pub fn ranking(&self, exclude_query: bool) -> Vec<usize> {
        let mut order: Vec<usize> =
            (0..self.scores.len()).filter(|&i| !(exclude_query && i == self.query)).collect();
        order.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then(a.cmp(&b)));
        order
    }
}

/// `β′(query, u_i) = →π(query, u_i) + ←π(u_i, query)` with total additive
/// error at most `epsilon`, both parts underestimating.
pub fn bhpp_query(g: &BipartiteGraph, meta: &IndexMeta, query: usize, epsilon: f64) -> Result<QueryResult> {
    meta.check(g)?;
    query_unchecked(g, meta, query, epsilon)
}

/// [`bhpp_query`] without the fingerprint check, for batch drivers that
/// verified the metadata once.
pub fn query_unchecked(
    g: &BipartiteGraph,
    meta: &IndexMeta,
    query: usize,
    epsilon: f64,
) -> Result<QueryResult> {
    g.check_u(query)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let epsilon_b = meta.epsilon_b(epsilon);
    let epsilon_f = epsilon - epsilon_b;
    if !(epsilon_b > 0.0 && epsilon_f > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "split of {epsilon} gave eps_b = {epsilon_b}, eps_f = {epsilon_f}"
        )));
    }

    let start = Instant::now();
    let backward = ss_push(g, query, meta.alpha, epsilon_b);
    let backward_done = Instant::now();
    let forward = pi_push(g, query, meta.alpha, meta.lambda, epsilon_f, &backward.ledger)?;
    let end = Instant::now();

    let scores = forward.estimate.iter().zip(backward.estimate()).map(|(f, b)| f + b).collect();
    Ok(QueryResult {
        query,
        method: Method::SsBiPush,
        scores,
        epsilon,
        epsilon_b,
        epsilon_f,
        timing: PhaseTiming {
            backward: backward_done - start,
            forward: end - backward_done,
            total: end - start,
        },
        backward: backward.trace,
        forward: forward.trace,
        gamma: Some(forward.gamma),
    })
}

/// Top `k` nodes as `(label, score)`, best first.
pub fn topk(g: &BipartiteGraph, result: &QueryResult, k: usize, exclude_query: bool) -> Vec<(String, f64)> {
    result
        .ranking(exclude_query)
        .into_iter()
        .take(k)
        .map(|i| (g.u_label(i).to_string(), result.scores[i]))
        .collect()
}
