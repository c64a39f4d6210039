use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{desirability, ndcg_at_k, precision_recall_at_k, predict_score, DegreeKind, RankedJudgment};
use super::similarity::Similarity;
use super::split::EvalSplit;
use crate::error::Result;
use crate::graph::BipartiteGraph;

/// One line of a metric report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub method: String,
    pub k: usize,
    pub metric: String,
    pub mean: f64,
    pub stddev: f64,
    pub n: usize,
}

impl MetricRow {
    fn summarize(method: &str, k: usize, metric: &str, values: &[f64]) -> Self {
        let n = values.len();
        let mean = if n == 0 { 0.0 } else { values.iter().sum::<f64>() / n as f64 };
        let stddev = if n < 2 {
            0.0
        } else {
            (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Self { method: method.to_string(), k, metric: metric.to_string(), mean, stddev, n }
    }
}

pub fn write_report<W: Write>(rows: &[MetricRow], mut out: W) -> Result<()> {
    writeln!(out, "method\tk\tmetric\tmean\tstddev\tn")?;
    for r in rows {
        writeln!(out, "{}\t{}\t{}\t{}\t{}\t{}", r.method, r.k, r.metric, r.mean, r.stddev, r.n)?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RewriteConfig {
    pub queries: usize,
    pub ks: Vec<usize>,
    pub degree: DegreeKind,
    pub seed: u64,
}

impl Default for RewriteConfig {
    fn default() -> Self {
        Self { queries: 100, ks: vec![5, 10], degree: DegreeKind::Count, seed: 0 }
    }
}

/// NDCG@k of each similarity's ranking of other queries, graded by
/// desirability on the full graph `g`. Similarities should be built on
/// `split.train`.
pub fn query_rewriting(
    g: &BipartiteGraph,
    sims: &[&dyn Similarity],
    config: &RewriteConfig,
) -> Result<Vec<MetricRow>> {
    let n = g.u_count();
    let grades = |q: usize| -> Vec<f64> {
        (0..n).map(|x| if x == q { 0.0 } else { desirability(g, q, x, config.degree) }).collect()
    };
    let mut eligible: Vec<usize> = (0..n).filter(|&q| grades(q).iter().any(|&r| r > 0.0)).collect();
    eligible.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    eligible.truncate(config.queries);
    eligible.sort_unstable();

    let mut rows = Vec::new();
    for sim in sims {
        let per_query: Vec<Vec<f64>> = eligible
            .par_iter()
            .map(|&q| -> Result<Vec<f64>> {
                let scores = sim.row(q)?;
                let mut ranking: Vec<usize> = (0..n).filter(|&x| x != q).collect();
                ranking.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
                let judgment = RankedJudgment { ranking, relevance: grades(q) };
                Ok(config.ks.iter().map(|&k| ndcg_at_k(&judgment, k)).collect())
            })
            .collect::<Result<_>>()?;
        for (i, &k) in config.ks.iter().enumerate() {
            let values: Vec<f64> = per_query.iter().map(|v| v[i]).collect();
            rows.push(MetricRow::summarize(sim.name(), k, "ndcg", &values));
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct RecommendConfig {
    pub users: usize,
    pub ks: Vec<usize>,
    pub similar_items: usize,
    pub seed: u64,
}

impl Default for RecommendConfig {
    fn default() -> Self {
        Self { users: 100, ks: vec![5, 10], similar_items: 50, seed: 0 }
    }
}

/// Precision@k and recall@k of item-based recommendation for sampled
/// V-side users, ranking each user's candidate list.
pub fn item_recommendation(
    split: &EvalSplit,
    sims: &[&dyn Similarity],
    config: &RecommendConfig,
) -> Result<Vec<MetricRow>> {
    let mut users: Vec<usize> =
        (0..split.candidates.len()).filter(|&v| !split.candidates[v].is_empty()).collect();
    users.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    users.truncate(config.users);
    users.sort_unstable();

    let mut rows = Vec::new();
    for sim in sims {
        let per_user: Vec<Vec<(f64, f64)>> = users
            .par_iter()
            .map(|&v| -> Result<Vec<(f64, f64)>> {
                let list = &split.candidates[v];
                let mut scored = Vec::with_capacity(list.len());
                for &item in list {
                    let row = sim.row(item)?;
                    scored.push((item, predict_score(&split.train, v, item, &row, config.similar_items)));
                }
                scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                let ranked: Vec<usize> = scored.into_iter().map(|(i, _)| i).collect();
                let truth = split.test_items(v);
                Ok(config
                    .ks
                    .iter()
                    .map(|&k| {
                        let pr = precision_recall_at_k(&ranked, &truth, k);
                        (pr.precision, pr.recall)
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        for (i, &k) in config.ks.iter().enumerate() {
            let p: Vec<f64> = per_user.iter().map(|v| v[i].0).collect();
            let r: Vec<f64> = per_user.iter().map(|v| v[i].1).collect();
            rows.push(MetricRow::summarize(sim.name(), k, "precision", &p));
            rows.push(MetricRow::summarize(sim.name(), k, "recall", &r));
        }
    }
    Ok(rows)
}
