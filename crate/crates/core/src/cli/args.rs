use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "bhpp", version, about = "Approximate BHPP queries on weighted bipartite graphs")]
#[command(args_override_self = true)]
pub struct Cli {
    /// key=value file supplying defaults for any long flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,

    /// Worker threads; 1 forces serial execution.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    JsonLines,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random bipartite edge list.
    Synth(SynthArgs),
    /// Build the binary graph cache and index metadata.
    Preprocess(PreprocessArgs),
    /// Score every U-node against one query node.
    Query(QueryArgs),
    /// The k best-scoring U-nodes for one query node.
    Topk(TopkArgs),
    /// Time methods across an epsilon sweep.
    Bench(BenchArgs),
    /// Query-rewriting evaluation (NDCG@k against desirability).
    EvalQr(EvalQrArgs),
    /// Item-recommendation evaluation (precision@k, recall@k).
    EvalRec(EvalRecArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub u_count: usize,
    #[arg(long)]
    pub v_count: usize,
    #[arg(long)]
    pub edges: usize,
    #[arg(long, default_value_t = 0.0)]
    pub weight_low: f64,
    #[arg(long, default_value_t = 10.0)]
    pub weight_high: f64,
    /// Power-law exponent for degree skew; uniform when absent.
    #[arg(long)]
    pub skew: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReadArgs {
    /// Whitespace-separated by default.
    #[arg(long)]
    pub delimiter: Option<char>,
    /// Weight for lines with only two columns.
    #[arg(long)]
    pub default_weight: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Edge list `u v weight`, one edge per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Graph cache to write; defaults to the input path with extension `.bhpp`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Metadata path; defaults to `<output>.meta.json`.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[arg(long, default_value_t = 0.15)]
    pub alpha: f64,
    #[arg(long)]
    pub tau: Option<usize>,
    /// Keep only the k-core before building.
    #[arg(long)]
    pub k_core: Option<usize>,
    #[command(flatten)]
    pub read: ReadArgs,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Graph cache (or edge list) produced by `preprocess`.
    #[arg(long)]
    pub graph: PathBuf,
    /// Defaults to `<graph>.meta.json`.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[command(flatten)]
    pub read: ReadArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ssbipush,
    Mcsp,
    Pisp,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Label of the query U-node.
    #[arg(long)]
    pub node: String,
    #[arg(long, default_value_t = 1e-4)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Ssbipush)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 1e-6)]
    pub p_f: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also emit the phase trace.
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct TopkArgs {
    #[command(flatten)]
    pub query: QueryArgs,
    #[arg(long, short, default_value_t = 10)]
    pub k: usize,
    #[arg(long)]
    pub exclude_query: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e-2, 1e-3])]
    pub epsilons: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![MethodArg::Ssbipush, MethodArg::Mcsp, MethodArg::Pisp])]
    pub methods: Vec<MethodArg>,
    #[arg(long, default_value_t = 100)]
    pub queries: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-query limit before a method is excluded.
    #[arg(long, default_value_t = 3600.0)]
    pub timeout_secs: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub p_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimilarityArg {
    Bhpp,
    Jaccard,
    Ppr,
    Exact,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Edge list or graph cache.
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub read: ReadArgs,
    #[arg(long, default_value_t = 0.2)]
    pub holdout: f64,
    /// k-core applied before splitting so every node keeps a training edge.
    #[arg(long, default_value_t = 2)]
    pub k_core: usize,
    #[arg(long, value_delimiter = ',', default_values_t = vec![5, 10])]
    pub ks: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![SimilarityArg::Bhpp, SimilarityArg::Jaccard, SimilarityArg::Ppr])]
    pub methods: Vec<SimilarityArg>,
    #[arg(long, default_value_t = 0.15)]
    pub alpha: f64,
    /// Error threshold for the BHPP similarity.
    #[arg(long, default_value_t = 1e-4)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DegreeArg {
    Count,
    Weighted,
}

#[derive(Debug, Args)]
pub struct EvalQrArgs {
    #[command(flatten)]
    pub eval: EvalArgs,
    #[arg(long, default_value_t = 100)]
    pub queries: usize,
    #[arg(long, value_enum, default_value_t = DegreeArg::Count)]
    pub degree: DegreeArg,
}

#[derive(Debug, Args)]
pub struct EvalRecArgs {
    #[command(flatten)]
    pub eval: EvalArgs,
    #[arg(long, default_value_t = 100)]
    pub users: usize,
    #[arg(long, default_value_t = 50)]
    pub similar_items: usize,
    #[arg(long, default_value_t = 100)]
    pub negatives: usize,
}

/// Flags that may appear before the subcommand.
pub const GLOBAL_KEYS: [&str; 3] = ["config", "format", "threads"];
pub const SUBCOMMANDS: [&str; 7] = ["synth", "preprocess", "query", "topk", "bench", "eval-qr", "eval-rec"];
