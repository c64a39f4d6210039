use std::collections::HashSet;

use crate::graph::BipartiteGraph;

/// How `d(q_j)` is measured in [`desirability`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeKind {
    #[default]
    Count,
    Weighted,
}

/// `Σ_{v ∈ N(q_i) ∩ N(q_j)} w(q_j, v) / d(q_j)` for two U-nodes.
pub fn desirability(g: &BipartiteGraph, qi: usize, qj: usize, degree: DegreeKind) -> f64 {
    let d = match degree {
        DegreeKind::Count => g.degree_u(qj) as f64,
        DegreeKind::Weighted => g.ws_u(qj),
    };
    // Both neighbor lists are sorted: merge them.
    let mut a = g.neighbors_u(qi).peekable();
    let mut total = 0.0;
    for (v, w) in g.neighbors_u(qj) {
        while a.next_if(|&(x, _)| x < v).is_some() {}
        if a.peek().is_some_and(|&(x, _)| x == v) {
            total += w / d;
        }
    }
    total
}

/// A predicted ranking of candidates with their relevance grades.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedJudgment {
    /// Candidate ids, best first.
    pub ranking: Vec<usize>,
    /// Grade of candidate `c` at `relevance[c]`.
    pub relevance: Vec<f64>,
}

/// NDCG@k with linear gain and `log2(position + 1)` discount; 0 when no
/// candidate is relevant.
pub fn ndcg_at_k(judgment: &RankedJudgment, k: usize) -> f64 {
    assert!(k >= 1, "k must be positive");
    let dcg = |grades: &mut dyn Iterator<Item = f64>| -> f64 {
        grades.take(k).enumerate().map(|(i, r)| r / (i as f64 + 2.0).log2()).sum()
    };
    let actual = dcg(&mut judgment.ranking.iter().map(|&c| judgment.relevance[c]));
    let mut ideal: Vec<f64> = judgment.relevance.clone();
    ideal.sort_by(|a, b| b.total_cmp(a));
    let best = dcg(&mut ideal.into_iter());
    if best > 0.0 {
        actual / best
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionRecall {
    pub precision: f64,
    pub recall: f64,
    pub hits: usize,
    /// Set when the ground truth was empty and recall was defined as 0.
    pub empty_truth: bool,
}

pub fn precision_recall_at_k(recommended: &[usize], truth: &HashSet<usize>, k: usize) -> PrecisionRecall {
    assert!(k >= 1, "k must be positive");
    let hits = recommended.iter().take(k).filter(|x| truth.contains(x)).count();
    PrecisionRecall {
        precision: hits as f64 / k as f64,
        recall: if truth.is_empty() { 0.0 } else { hits as f64 / truth.len() as f64 },
        hits,
        empty_truth: truth.is_empty(),
    }
}

/// The `size` items most similar to `item`, excluding itself; ties by index.
pub fn most_similar(sim: &[f64], item: usize, size: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sim.len()).filter(|&j| j != item).collect();
    order.sort_by(|&a, &b| sim[b].total_cmp(&sim[a]).then(a.cmp(&b)));
    order.truncate(size);
    order
}

/// Item-based prediction `p(v, u_i)` over `S(u_i) ∪ N(v)`, where `sim` is
/// the row `sim(u_i, ·)` and `S(u_i)` its top `s_size` entries.
pub fn predict_score(g: &BipartiteGraph, v: usize, item: usize, sim: &[f64], s_size: usize) -> f64 {
    let mut pool = most_similar(sim, item, s_size);
    pool.extend(g.neighbors_v(v).map(|(u, _)| u));
    pool.sort_unstable();
    pool.dedup();
    let (mut num, mut den) = (0.0, 0.0);
    for uj in pool {
        num += sim[uj] * g.weight(uj, v);
        den += sim[uj];
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::build;
    use crate::testutil::random_graph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn desirability_examples() {
        let g = build(3, 2, &[(0, 0, 1.0), (1, 1, 1.0), (2, 0, 1.0)]);
        assert_eq!(desirability(&g, 0, 1, DegreeKind::Count), 0.0);
        assert_eq!(desirability(&g, 0, 2, DegreeKind::Count), 1.0);
        let w = build(2, 2, &[(0, 0, 1.0), (1, 0, 2.0), (1, 1, 6.0)]);
        assert_eq!(desirability(&w, 0, 1, DegreeKind::Count), 1.0);
        assert_eq!(desirability(&w, 0, 1, DegreeKind::Weighted), 0.25);
    }

    #[test]
    fn ndcg_examples() {
        let perfect = RankedJudgment { ranking: vec![2, 0, 1], relevance: vec![1.0, 0.0, 3.0] };
        assert_eq!(ndcg_at_k(&perfect, 3), 1.0);
        let last = RankedJudgment { ranking: vec![0, 1], relevance: vec![0.0, 1.0] };
        assert!((ndcg_at_k(&last, 2) - 1.0 / 3f64.log2()).abs() < 1e-15);
        assert!((ndcg_at_k(&last, 2) - 0.6309297535714575).abs() < 1e-15);
        let none = RankedJudgment { ranking: vec![0, 1], relevance: vec![0.0, 0.0] };
        assert_eq!(ndcg_at_k(&none, 2), 0.0);
    }

    #[test]
    fn ndcg_ignores_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.gen_range(2..20);
            let relevance: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
            let mut ranking: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(&mut ranking[..], &mut rng);
            let mut perm: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(&mut perm[..], &mut rng);
            let mut moved = vec![0.0; n];
            for c in 0..n {
                moved[perm[c]] = relevance[c];
            }
            let a = RankedJudgment { ranking: ranking.clone(), relevance };
            let b = RankedJudgment { ranking: ranking.iter().map(|&c| perm[c]).collect(), relevance: moved };
            let k = rng.gen_range(1..=n);
            assert!((ndcg_at_k(&a, k) - ndcg_at_k(&b, k)).abs() < 1e-12);
        }
    }

    #[test]
    fn precision_recall_examples() {
        let truth: HashSet<usize> = [1, 2, 3, 4].into();
        let rec = [1, 9, 2, 8, 7, 6, 5, 10, 11, 12];
        let pr = precision_recall_at_k(&rec, &truth, 10);
        assert_eq!((pr.precision, pr.recall, pr.hits), (0.2, 0.5, 2));
        assert_eq!(precision_recall_at_k(&[1, 2], &truth, 2).precision, 1.0);
        assert_eq!(precision_recall_at_k(&[4, 3, 2, 1, 0], &truth, 5).recall, 1.0);
        let empty = precision_recall_at_k(&[1], &HashSet::new(), 1);
        assert!(empty.empty_truth && empty.recall == 0.0);
    }

    #[test]
    fn predict_score_examples() {
        let g = build(3, 2, &[(0, 0, 1.0), (1, 1, 4.0), (2, 0, 1.0)]);
        assert_eq!(predict_score(&g, 0, 1, &[0.0, 0.0, 0.0], 5), 0.0);
        // Only u0 carries similarity and user v0 rated it 1.
        assert_eq!(predict_score(&g, 0, 1, &[0.7, 0.0, 0.0], 1), 1.0);
        assert_eq!(predict_score(&g, 1, 0, &[0.0, 0.3, 0.0], 1), 4.0);
    }

    #[test]
    fn desirability_and_prediction_match_brute_force() {
        for seed in 0..10 {
            let g = random_graph(5, 30, 1100 + seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sim: Vec<f64> = (0..g.u_count()).map(|_| rng.gen_range(0.0..1.0)).collect();
            for qi in 0..g.u_count() {
                for qj in 0..g.u_count() {
                    let mut naive = 0.0;
                    for v in 0..g.v_count() {
                        if g.weight(qi, v) > 0.0 && g.weight(qj, v) > 0.0 {
                            naive += g.weight(qj, v) / g.degree_u(qj) as f64;
                        }
                    }
                    assert!((desirability(&g, qi, qj, DegreeKind::Count) - naive).abs() < 1e-12);
                }
            }
            for v in 0..g.v_count() {
                let item = v % g.u_count();
                let s = most_similar(&sim, item, 4);
                let (mut num, mut den) = (0.0, 0.0);
                for (uj, &s_j) in sim.iter().enumerate() {
                    if s.contains(&uj) || g.weight(uj, v) > 0.0 {
                        num += s_j * g.weight(uj, v);
                        den += s_j;
                    }
                }
                let naive = if den == 0.0 { 0.0 } else { num / den };
                assert!((predict_score(&g, v, item, &sim, 4) - naive).abs() < 1e-12);
            }
        }
    }
}
