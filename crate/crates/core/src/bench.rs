//! Seeded evaluation harness for the two query tasks.
//!
//! Private owners are sampled uniformly (with replacement) from a seeded RNG.
//! For shortest paths, each owner is paired with a target drawn uniformly from
//! the vertices it can reach in its view; every multiplicative factor in the
//! sweep is scored by approximation ratio against breadth-first search. For
//! PageRank, the local-push baseline on the owner's view is the reference and
//! the precomputed-public heuristic is scored by RMSE, cosine and τ@k.
//!
//! Speed-up is reported twice: as a ratio of deterministic work counters
//! (adjacency scans, sketch comparisons, residual updates), which keeps the
//! CSV byte-identical for a fixed seed, and optionally as a wall-clock ratio.

use std::io::Write;
use std::time::Instant;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::{approximation_ratio, cosine, kendall_tau_at_k, network_stats, rmse, NetworkStats};
use crate::model::{view, PPGraph, VertexId};
use crate::par::Parallelism;
use crate::ppr::{
    ppr_heuristic_counted, ppr_push_counted, precompute_public_ppr, PprStore, DEFAULT_ALPHA, DEFAULT_EPS,
};
use crate::sketch::{
    bfs_distances, build_sketches, exact_distance_counted, private_sketch_distance_counted, DistanceSketchSet,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    ShortestPath,
    PageRank,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::ShortestPath => "sp",
            Task::PageRank => "ppr",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub queries: usize,
    pub seed: u64,
    pub factors: Vec<f64>,
    pub alpha: f64,
    /// Push tolerance of the baseline run on each view.
    pub eps: f64,
    /// Push tolerance of the offline public store.
    pub store_eps: f64,
    pub top_k: usize,
    pub timings: bool,
    pub threads: usize,
    pub parallelism: Parallelism,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            queries: 50,
            seed: 1,
            factors: vec![1.0, 0.5, 0.25],
            alpha: DEFAULT_ALPHA,
            eps: DEFAULT_EPS,
            store_eps: 1e-3,
            top_k: 50,
            timings: false,
            threads: 0,
            parallelism: Parallelism::default(),
        }
    }
}

/// Wall-clock summary in milliseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timing {
    pub mean_ms: f64,
    pub p50_ms: f64,
    pub p95_ms: f64,
}

impl Timing {
    fn from_samples(mut ms: Vec<f64>) -> Self {
        if ms.is_empty() {
            return Timing::default();
        }
        ms.sort_by(f64::total_cmp);
        let rank = |q: f64| ms[((q * ms.len() as f64).ceil() as usize).clamp(1, ms.len()) - 1];
        Timing {
            mean_ms: ms.iter().sum::<f64>() / ms.len() as f64,
            p50_ms: rank(0.5),
            p95_ms: rank(0.95),
        }
    }
}

/// One CSV row. Columns that do not apply to a task stay empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchRow {
    pub task: &'static str,
    pub cutoff: Option<NaiveDate>,
    pub stats: Option<NetworkStats>,
    pub factor: Option<f64>,
    pub repetitions: Option<u32>,
    pub alpha: Option<f64>,
    pub eps: Option<f64>,
    pub store_eps: Option<f64>,
    pub queries: usize,
    pub answered: usize,
    pub mean_sketch_entries: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub rmse: Option<f64>,
    pub cosine: Option<f64>,
    pub tau_at_k: Option<f64>,
    pub exact_work: f64,
    pub fast_work: f64,
    pub exact_time: Timing,
    pub fast_time: Timing,
    pub precompute_ms: f64,
}

impl BenchRow {
    pub fn speedup_work(&self) -> Option<f64> {
        (self.fast_work > 0.0).then(|| self.exact_work / self.fast_work)
    }

    pub fn speedup_wall(&self) -> Option<f64> {
        (self.fast_time.mean_ms > 0.0).then(|| self.exact_time.mean_ms / self.fast_time.mean_ms)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub top_k: usize,
    pub rows: Vec<BenchRow>,
}

const BASE_COLUMNS: &[&str] = &[
    "task",
    "cutoff",
    "n_vertices",
    "n_public_edges",
    "n_private_vertices",
    "n_private_edges",
    "delta_g",
    "factor",
    "repetitions",
    "alpha",
    "eps",
    "store_eps",
    "queries",
    "answered",
    "mean_sketch_entries",
    "mean_ratio",
    "max_ratio",
    "rmse",
    "cosine",
    "tau_at_k",
    "exact_work",
    "fast_work",
    "speedup_work",
];

const TIMING_COLUMNS: &[&str] = &[
    "exact_ms_mean",
    "exact_ms_p50",
    "exact_ms_p95",
    "fast_ms_mean",
    "fast_ms_p50",
    "fast_ms_p95",
    "speedup_wall",
    "precompute_ms",
];

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v:.6}"))
}

fn fmt_param(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v}"))
}

impl BenchReport {
    pub fn columns(timings: bool) -> Vec<String> {
        let mut cols: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
        if timings {
            cols.extend(TIMING_COLUMNS.iter().map(|s| s.to_string()));
        }
        cols
    }

    pub fn write_csv<W: Write>(&self, out: W, timings: bool) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = Self::columns(timings);
        if let Some(pos) = header.iter().position(|c| c == "tau_at_k") {
            header[pos] = format!("tau_at_{}", self.top_k);
        }
        w.write_record(&header)?;
        for r in &self.rows {
            let stats = r.stats.as_ref();
            let mut rec = vec![
                r.task.to_owned(),
                r.cutoff.map_or_else(String::new, |d| d.format("%Y-%m-%d").to_string()),
                stats.map_or_else(String::new, |s| s.n_vertices.to_string()),
                stats.map_or_else(String::new, |s| s.n_public_edges.to_string()),
                stats.map_or_else(String::new, |s| s.n_private_vertices.to_string()),
                stats.map_or_else(String::new, |s| s.n_private_edges.to_string()),
                fmt_opt(stats.and_then(|s| s.delta_g)),
                fmt_param(r.factor),
                r.repetitions.map_or_else(String::new, |x| x.to_string()),
                fmt_param(r.alpha),
                fmt_param(r.eps),
                fmt_param(r.store_eps),
                r.queries.to_string(),
                r.answered.to_string(),
                fmt_opt(r.mean_sketch_entries),
                fmt_opt(r.mean_ratio),
                fmt_opt(r.max_ratio),
                fmt_opt(r.rmse),
                fmt_opt(r.cosine),
                fmt_opt(r.tau_at_k),
                format!("{:.3}", r.exact_work),
                format!("{:.3}", r.fast_work),
                fmt_opt(r.speedup_work()),
            ];
            if timings {
                rec.extend([
                    format!("{:.6}", r.exact_time.mean_ms),
                    format!("{:.6}", r.exact_time.p50_ms),
                    format!("{:.6}", r.exact_time.p95_ms),
                    format!("{:.6}", r.fast_time.mean_ms),
                    format!("{:.6}", r.fast_time.p50_ms),
                    format!("{:.6}", r.fast_time.p95_ms),
                    fmt_opt(r.speedup_wall()),
                    format!("{:.3}", r.precompute_ms),
                ]);
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// `queries` owners drawn uniformly with replacement from `V_private`.
pub fn sample_owners<R: Rng>(g: &PPGraph, queries: usize, rng: &mut R) -> Result<Vec<VertexId>> {
    let owners: Vec<VertexId> = g.private_vertices().collect();
    if owners.is_empty() {
        return Err(Error::NoPrivateOwners);
    }
    Ok((0..queries)
        .map(|_| *owners.choose(rng).expect("nonempty"))
        .collect())
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

struct SpQuery {
    source: VertexId,
    target: VertexId,
    exact: u32,
    exact_work: u64,
    exact_ms: f64,
}

/// Shortest-path sweep over `cfg.factors`.
pub fn run_sp(g: &PPGraph, cutoff: Option<NaiveDate>, cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.queries == 0 {
        return Err(Error::InvalidParameter("queries must be ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sources = sample_owners(g, cfg.queries, &mut rng)?;
    let mut pairs = Vec::with_capacity(sources.len());
    for &s in &sources {
        let vw = view(g, s)?;
        let reachable: Vec<VertexId> = bfs_distances(&vw, s)?
            .into_iter()
            .enumerate()
            .filter(|&(_, d)| d.is_some_and(|d| d > 0))
            .map(|(i, _)| VertexId::from_index(i))
            .collect();
        pairs.push((s, reachable.choose(&mut rng).copied()));
    }

    let par = cfg.parallelism;
    let queries: Vec<SpQuery> = par.install(cfg.threads, || {
        par.map(&pairs, |&(s, t)| -> Result<Option<SpQuery>> {
            let Some(t) = t else { return Ok(None) };
            let vw = view(g, s)?;
            let mut work = 0;
            let start = Instant::now();
            let exact = exact_distance_counted(&vw, s, t, &mut work)?.expect("target reachable");
            Ok(Some(SpQuery {
                source: s,
                target: t,
                exact,
                exact_work: work,
                exact_ms: elapsed_ms(start),
            }))
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?
    .into_iter()
    .flatten()
    .collect();

    let stats = network_stats(g);
    let mut rows = Vec::new();
    for &factor in &cfg.factors {
        let start = Instant::now();
        let sk = build_sketches(g.public(), factor, cfg.seed, par)?;
        let precompute_ms = elapsed_ms(start);
        let row = par.install(cfg.threads, || sp_row(g, &sk, &queries, par))?;
        rows.push(BenchRow {
            task: Task::ShortestPath.name(),
            cutoff,
            stats: Some(stats),
            factor: Some(factor),
            repetitions: Some(sk.repetitions()),
            queries: cfg.queries,
            mean_sketch_entries: Some(sk.mean_entries()),
            precompute_ms,
            ..row
        });
    }
    Ok(BenchReport {
        top_k: cfg.top_k,
        rows,
    })
}

fn sp_row(g: &PPGraph, sk: &DistanceSketchSet, queries: &[SpQuery], par: Parallelism) -> Result<BenchRow> {
    let results = par.map(queries, |q| -> Result<(Option<u32>, u64, f64)> {
        let vw = view(g, q.source)?;
        let mut work = 0;
        let start = Instant::now();
        let est = private_sketch_distance_counted(sk, &vw, q.target, &mut work)?;
        Ok((est, work, elapsed_ms(start)))
    });
    let mut ratios = Vec::new();
    let (mut exact_ms, mut fast_ms) = (Vec::new(), Vec::new());
    let (mut exact_work, mut fast_work) = (0u64, 0u64);
    for (q, r) in queries.iter().zip(results) {
        let (est, work, ms) = r?;
        exact_ms.push(q.exact_ms);
        fast_ms.push(ms);
        exact_work += q.exact_work;
        fast_work += work;
        if let Some(e) = est {
            ratios.push(approximation_ratio(e, q.exact)?);
        }
    }
    let m = queries.len().max(1) as f64;
    Ok(BenchRow {
        answered: ratios.len(),
        mean_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
        max_ratio: ratios.iter().copied().reduce(f64::max),
        exact_work: exact_work as f64 / m,
        fast_work: fast_work as f64 / m,
        exact_time: Timing::from_samples(exact_ms),
        fast_time: Timing::from_samples(fast_ms),
        ..Default::default()
    })
}

/// PageRank comparison of the heuristic against the push baseline.
pub fn run_ppr(g: &PPGraph, cutoff: Option<NaiveDate>, cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.queries == 0 {
        return Err(Error::InvalidParameter("queries must be ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sources = sample_owners(g, cfg.queries, &mut rng)?;
    let par = cfg.parallelism;
    let start = Instant::now();
    let store = par.install(cfg.threads, || precompute_public_ppr(g.public(), cfg.alpha, cfg.store_eps, par))?;
    let precompute_ms = elapsed_ms(start);
    let row = par.install(cfg.threads, || ppr_row(g, &store, &sources, cfg))?;
    Ok(BenchReport {
        top_k: cfg.top_k,
        rows: vec![BenchRow {
            task: Task::PageRank.name(),
            cutoff,
            stats: Some(network_stats(g)),
            alpha: Some(cfg.alpha),
            eps: Some(cfg.eps),
            store_eps: Some(cfg.store_eps),
            precompute_ms,
            ..row
        }],
    })
}

struct PprOutcome {
    rmse: f64,
    cosine: f64,
    tau: f64,
    exact_work: u64,
    fast_work: u64,
    exact_ms: f64,
    fast_ms: f64,
}

fn ppr_row(g: &PPGraph, store: &PprStore, sources: &[VertexId], cfg: &BenchConfig) -> Result<BenchRow> {
    let n = g.vertex_count();
    let outcomes = cfg.parallelism.map(sources, |&u| -> Result<PprOutcome> {
        let vw = view(g, u)?;
        let (mut ew, mut fw) = (0, 0);
        let t0 = Instant::now();
        let truth = ppr_push_counted(&vw, u, cfg.alpha, cfg.eps, &mut ew)?;
        let exact_ms = elapsed_ms(t0);
        let t1 = Instant::now();
        let approx = ppr_heuristic_counted(store, &vw, u, cfg.alpha, &mut fw)?;
        let fast_ms = elapsed_ms(t1);
        let (x, y) = (truth.to_dense(n), approx.to_dense(n));
        Ok(PprOutcome {
            rmse: rmse(&x, &y)?,
            cosine: cosine(&x, &y)?,
            tau: kendall_tau_at_k(&truth.ranking(), &approx.ranking(), cfg.top_k)?,
            exact_work: ew,
            fast_work: fw,
            exact_ms,
            fast_ms,
        })
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let m = outcomes.len() as f64;
    let mean = |f: &dyn Fn(&PprOutcome) -> f64| outcomes.iter().map(f).sum::<f64>() / m;
    Ok(BenchRow {
        queries: sources.len(),
        answered: outcomes.len(),
        rmse: Some(mean(&|o| o.rmse)),
        cosine: Some(mean(&|o| o.cosine)),
        tau_at_k: Some(mean(&|o| o.tau)),
        exact_work: mean(&|o| o.exact_work as f64),
        fast_work: mean(&|o| o.fast_work as f64),
        exact_time: Timing::from_samples(outcomes.iter().map(|o| o.exact_ms).collect()),
        fast_time: Timing::from_samples(outcomes.iter().map(|o| o.fast_ms).collect()),
        ..Default::default()
    })
}

pub fn run(g: &PPGraph, cutoff: Option<NaiveDate>, task: Task, cfg: &BenchConfig) -> Result<BenchReport> {
    match task {
        Task::ShortestPath => run_sp(g, cutoff, cfg),
        Task::PageRank => run_ppr(g, cutoff, cfg),
    }
}
