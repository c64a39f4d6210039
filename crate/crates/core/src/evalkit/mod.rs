//! Query-rewriting and item-recommendation evaluation over any similarity.

mod metrics;
mod pipeline;
mod similarity;
mod split;

pub use metrics::{
    desirability, most_similar, ndcg_at_k, precision_recall_at_k, predict_score, DegreeKind,
    PrecisionRecall, RankedJudgment,
};
pub use pipeline::{
    item_recommendation, query_rewriting, write_report, MetricRow, RecommendConfig, RewriteConfig,
};
pub use similarity::{BhppSimilarity, ExactBhpp, Jaccard, NaivePpr, Similarity};
pub use split::{split_edges, EvalSplit, SplitOptions};
