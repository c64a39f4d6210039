use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use bhpp::baselines::build_alias;
use bhpp::bench::{run_bench, run_method, BenchConfig};
use bhpp::evalkit::{
    item_recommendation, query_rewriting, split_edges, BhppSimilarity, DegreeKind, ExactBhpp, Jaccard,
    NaivePpr, Similarity, SplitOptions,
};
use bhpp::graph::{
    k_core_filter, load_edge_list, synth_bipartite, write_edge_list, LoadOptions, Side, SynthParams,
    WeightRange, CACHE_MAGIC,
};
use bhpp::oracle::exact_hpp;
use bhpp::push::required_iterations;
use bhpp::query::{topk, IndexMeta, Method, QueryResult};
use bhpp::{BipartiteGraph, Error, Result};
use serde::Serialize;

use super::args::*;

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    /// Some method was dropped for exceeding its time limit.
    Excluded,
}

pub struct Emitter<'a> {
    pub format: Format,
    pub out: &'a mut dyn Write,
}

impl Emitter<'_> {
    fn rows<T: Serialize>(&mut self, rows: &[T], header: bool) -> Result<()> {
        match self.format {
            Format::Tsv => {
                let mut w = csv::WriterBuilder::new()
                    .delimiter(b'\t')
                    .has_headers(header)
                    .from_writer(&mut *self.out);
                for r in rows {
                    w.serialize(r).map_err(std::io::Error::other)?;
                }
                w.flush()?;
            }
            Format::JsonLines => {
                for r in rows {
                    serde_json::to_writer(&mut *self.out, r)?;
                    self.out.write_all(b"\n")?;
                }
            }
        }
        Ok(())
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidParameter("--threads must be at least 1".into()));
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut emit = Emitter { format: cli.format, out };
    match cli.command {
        Command::Synth(a) => synth(a, &mut emit),
        Command::Preprocess(a) => preprocess(a, &mut emit),
        Command::Query(a) => query(a, None, &mut emit),
        Command::Topk(a) => query(a.query, Some((a.k, a.exclude_query)), &mut emit),
        Command::Bench(a) => bench(a, &mut emit),
        Command::EvalQr(a) => eval_qr(a, &mut emit),
        Command::EvalRec(a) => eval_rec(a, &mut emit),
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")))
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")))
    }
}

fn load_options(read: &ReadArgs) -> LoadOptions {
    LoadOptions { delimiter: read.delimiter, default_weight: read.default_weight }
}

/// Reads a graph cache, or an edge list when the file lacks the cache magic.
pub fn load_graph(path: &Path, read: &ReadArgs) -> Result<BipartiteGraph> {
    let mut head = [0u8; 8];
    let is_cache = {
        let mut f = File::open(path)?;
        f.read(&mut head)? == head.len() && &head == CACHE_MAGIC
    };
    if is_cache {
        BipartiteGraph::open_cache(path)
    } else {
        load_edge_list(BufReader::new(File::open(path)?), &load_options(read))
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn synth(a: SynthArgs, emit: &mut Emitter) -> Result<Outcome> {
    let params = SynthParams {
        u_count: a.u_count,
        v_count: a.v_count,
        edge_count: a.edges,
        weights: WeightRange::new(a.weight_low, a.weight_high)?,
        degree_skew: a.skew,
    };
    let g = synth_bipartite(&params, a.seed)?;
    match a.output {
        Some(path) => write_edge_list(&g, BufWriter::new(File::create(path)?))?,
        None => write_edge_list(&g, &mut *emit.out)?,
    }
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct PreprocessSummary {
    u_count: usize,
    v_count: usize,
    edge_count: usize,
    alpha: f64,
    lambda: f64,
    mu: f64,
    tau: usize,
    build_secs: f64,
    cache: String,
    meta: String,
}

fn preprocess(a: PreprocessArgs, emit: &mut Emitter) -> Result<Outcome> {
    check_alpha(a.alpha)?;
    let started = Instant::now();
    let mut g = load_edge_list(BufReader::new(File::open(&a.input)?), &load_options(&a.read))?;
    if let Some(k) = a.k_core {
        g = k_core_filter(&g, k)?;
    }
    let meta = match a.tau {
        Some(tau) => IndexMeta::build_with_tau(&g, a.alpha, tau)?,
        None => IndexMeta::build(&g, a.alpha)?,
    };
    let cache = a.output.unwrap_or_else(|| a.input.with_extension("bhpp"));
    let meta_path = a.meta.unwrap_or_else(|| with_suffix(&cache, ".meta.json"));
    g.save_cache(&cache)?;
    meta.save(&meta_path)?;
    let summary = PreprocessSummary {
        u_count: g.u_count(),
        v_count: g.v_count(),
        edge_count: g.edge_count(),
        alpha: meta.alpha,
        lambda: meta.lambda,
        mu: meta.mu,
        tau: meta.tau,
        build_secs: started.elapsed().as_secs_f64(),
        cache: cache.display().to_string(),
        meta: meta_path.display().to_string(),
    };
    emit.rows(&[summary], true)?;
    Ok(Outcome::Done)
}

fn open_indexed(a: &GraphArgs) -> Result<(BipartiteGraph, IndexMeta)> {
    let g = load_graph(&a.graph, &a.read)?;
    let meta_path = a.meta.clone().unwrap_or_else(|| with_suffix(&a.graph, ".meta.json"));
    let meta = IndexMeta::load(&meta_path).map_err(|e| match e {
        Error::Io(io) => Error::Cache { path: meta_path.clone(), message: format!("{io}; run `bhpp preprocess` first") },
        other => other,
    })?;
    meta.check(&g)?;
    Ok((g, meta))
}

fn method_of(m: MethodArg) -> Method {
    match m {
        MethodArg::Ssbipush => Method::SsBiPush,
        MethodArg::Mcsp => Method::Mcsp,
        MethodArg::Pisp => Method::Pisp,
    }
}

#[derive(Serialize)]
struct ScoreRow<'a> {
    label: &'a str,
    score: f64,
}

#[derive(Serialize)]
struct TraceRecord<'a> {
    trace: &'a QueryResult,
}

fn query(a: QueryArgs, top: Option<(usize, bool)>, emit: &mut Emitter) -> Result<Outcome> {
    check_epsilon(a.epsilon)?;
    let (g, meta) = open_indexed(&a.graph)?;
    let q = g.u_index_of(&a.node).ok_or_else(|| Error::UnknownLabel(a.node.clone()))?;
    let alias = build_alias(&g);
    let result = run_method(method_of(a.method), &g, &meta, &alias, q, a.epsilon, a.p_f, a.seed, None)?;
    if a.verbose {
        let mut trace = result.clone();
        trace.scores.clear();
        match emit.format {
            Format::JsonLines => emit.rows(&[TraceRecord { trace: &trace }], false)?,
            Format::Tsv => eprintln!("{}", serde_json::to_string(&trace)?),
        }
    }
    let ranked: Vec<(String, f64)> = match top {
        Some((k, exclude)) => {
            if k == 0 {
                return Err(Error::InvalidParameter("k must be at least 1".into()));
            }
            topk(&g, &result, k, exclude)
        }
        None => topk(&g, &result, g.u_count(), false),
    };
    let rows: Vec<ScoreRow> = ranked.iter().map(|(l, s)| ScoreRow { label: l, score: *s }).collect();
    emit.rows(&rows, false)?;
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct Tagged<'a, T> {
    record: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

fn bench(a: BenchArgs, emit: &mut Emitter) -> Result<Outcome> {
    for &e in &a.epsilons {
        check_epsilon(e)?;
    }
    if !(a.timeout_secs >= 0.0 && a.timeout_secs.is_finite()) {
        return Err(Error::InvalidParameter(format!("bad timeout {}", a.timeout_secs)));
    }
    let (g, meta) = open_indexed(&a.graph)?;
    let alias = build_alias(&g);
    let config = BenchConfig {
        epsilons: a.epsilons,
        methods: a.methods.into_iter().map(method_of).collect(),
        queries: a.queries,
        seed: a.seed,
        timeout: Duration::from_secs_f64(a.timeout_secs),
        p_f: a.p_f,
    };
    let report = run_bench(&g, &meta, &alias, &config)?;
    match emit.format {
        Format::Tsv => {
            emit.rows(&report.cells, true)?;
            writeln!(emit.out)?;
            emit.rows(&report.agreements, true)?;
        }
        Format::JsonLines => {
            let cells: Vec<_> = report.cells.iter().map(|c| Tagged { record: "cell", body: c }).collect();
            let agree: Vec<_> =
                report.agreements.iter().map(|c| Tagged { record: "agreement", body: c }).collect();
            emit.rows(&cells, false)?;
            emit.rows(&agree, false)?;
        }
    }
    Ok(if report.any_excluded() { Outcome::Excluded } else { Outcome::Done })
}

fn eval_graph(a: &EvalArgs) -> Result<BipartiteGraph> {
    check_alpha(a.alpha)?;
    check_epsilon(a.epsilon)?;
    if a.ks.contains(&0) {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let g = load_graph(&a.graph, &a.read)?;
    k_core_filter(&g, a.k_core)
}

/// Owns whichever similarity plugs were requested.
fn similarities<'g>(a: &EvalArgs, train: &'g BipartiteGraph) -> Result<Vec<Box<dyn Similarity + 'g>>> {
    let mut sims: Vec<Box<dyn Similarity + 'g>> = Vec::new();
    for m in &a.methods {
        sims.push(match m {
            SimilarityArg::Bhpp => Box::new(BhppSimilarity::new(train, a.alpha, a.epsilon)?),
            SimilarityArg::Jaccard => Box::new(Jaccard { graph: train }),
            SimilarityArg::Ppr => Box::new(NaivePpr {
                graph: train,
                alpha: a.alpha,
                iterations: required_iterations(a.alpha, a.epsilon, 1.0),
            }),
            SimilarityArg::Exact => Box::new(ExactBhpp { dense: exact_hpp(train, a.alpha, 1e-12)? }),
        });
    }
    Ok(sims)
}

fn eval_qr(a: EvalQrArgs, emit: &mut Emitter) -> Result<Outcome> {
    let g = eval_graph(&a.eval)?;
    let options = SplitOptions { holdout_ratio: a.eval.holdout, side: Side::U, negatives: 0 };
    let split = split_edges(&g, &options, a.eval.seed)?;
    let owned = similarities(&a.eval, &split.train)?;
    let sims: Vec<&dyn Similarity> = owned.iter().map(|s| s.as_ref()).collect();
    let config = bhpp::evalkit::RewriteConfig {
        queries: a.queries,
        ks: a.eval.ks.clone(),
        degree: match a.degree {
            DegreeArg::Count => DegreeKind::Count,
            DegreeArg::Weighted => DegreeKind::Weighted,
        },
        seed: a.eval.seed,
    };
    let rows = query_rewriting(&g, &sims, &config)?;
    emit.rows(&rows, true)?;
    Ok(Outcome::Done)
}

fn eval_rec(a: EvalRecArgs, emit: &mut Emitter) -> Result<Outcome> {
    let g = eval_graph(&a.eval)?;
    let options = SplitOptions { holdout_ratio: a.eval.holdout, side: Side::V, negatives: a.negatives };
    let split = split_edges(&g, &options, a.eval.seed)?;
    let owned = similarities(&a.eval, &split.train)?;
    let sims: Vec<&dyn Similarity> = owned.iter().map(|s| s.as_ref()).collect();
    let config = bhpp::evalkit::RecommendConfig {
        users: a.users,
        ks: a.eval.ks.clone(),
        similar_items: a.similar_items,
        seed: a.eval.seed,
    };
    let rows = item_recommendation(&split, &sims, &config)?;
    emit.rows(&rows, true)?;
    Ok(Outcome::Done)
}
