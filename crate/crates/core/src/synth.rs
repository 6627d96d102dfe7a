//! Seeded generators for synthetic records and public-private graphs, used by
//! the test suites, the acceptance checks and the benchmarks.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::ingest::PaperRecord;
use crate::model::{ordered_edge, AttributeStore, Edge, KeywordSet, PPGraph, PrivateGraph, PublicGraph, VertexId};

const VOCABULARY: &[&str] = &[
    "graph", "query", "index", "search", "keyword", "skyline", "xml", "sql", "stream", "privacy",
    "network", "social", "learning", "mining", "community", "distance", "sketch", "pagerank",
    "ranking", "cluster", "tree", "spatial", "temporal", "database", "parallel", "system",
];

#[derive(Clone, Debug)]
pub struct RecordConfig {
    pub authors: usize,
    pub papers: usize,
    pub max_authors_per_paper: usize,
    pub first_year: i32,
    pub last_year: i32,
    pub max_title_words: usize,
}

impl Default for RecordConfig {
    fn default() -> Self {
        RecordConfig {
            authors: 40,
            papers: 60,
            max_authors_per_paper: 4,
            first_year: 2008,
            last_year: 2017,
            max_title_words: 4,
        }
    }
}

/// Random publication records with dates spread over the configured years.
pub fn random_records<R: Rng>(rng: &mut R, cfg: &RecordConfig) -> Vec<PaperRecord> {
    let pool: Vec<String> = (0..cfg.authors).map(|i| format!("Author {i:04}")).collect();
    (0..cfg.papers)
        .map(|_| {
            let k = rng.gen_range(1..=cfg.max_authors_per_paper.min(pool.len()).max(1));
            let authors: Vec<&String> = pool.choose_multiple(rng, k).collect();
            let year = rng.gen_range(cfg.first_year..=cfg.last_year);
            let date = NaiveDate::from_ymd_opt(year, rng.gen_range(1..=12), rng.gen_range(1..=28))
                .expect("valid date");
            let words = rng.gen_range(0..=cfg.max_title_words);
            let title: Vec<&str> = (0..words)
                .map(|_| *VOCABULARY.choose(rng).expect("nonempty"))
                .collect();
            PaperRecord::new(authors, date, &title.join(" ")).expect("nonempty authors")
        })
        .collect()
}

/// Erdős–Rényi style graph with about `n·avg_degree/2` distinct edges.
pub fn random_edges<R: Rng>(rng: &mut R, n: usize, avg_degree: f64) -> Vec<Edge> {
    let target = ((n as f64 * avg_degree) / 2.0).round() as usize;
    let max = n * n.saturating_sub(1) / 2;
    let target = target.min(max);
    let mut set = BTreeSet::new();
    while set.len() < target {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            set.insert(ordered_edge(VertexId::from_index(a), VertexId::from_index(b)));
        }
    }
    set.into_iter().collect()
}

/// Watts–Strogatz small world: a ring where every vertex links to its `k/2`
/// nearest neighbors on each side, each edge rewired with probability `p`.
pub fn small_world_edges<R: Rng>(rng: &mut R, n: usize, k: usize, p: f64) -> Vec<Edge> {
    let half = (k / 2).max(1);
    let mut set = BTreeSet::new();
    for i in 0..n {
        for j in 1..=half {
            let a = VertexId::from_index(i);
            let mut b = VertexId::from_index((i + j) % n);
            if rng.gen_bool(p) {
                loop {
                    let c = VertexId::from_index(rng.gen_range(0..n));
                    if c != a && !set.contains(&ordered_edge(a, c)) {
                        b = c;
                        break;
                    }
                }
            }
            if a != b {
                set.insert(ordered_edge(a, b));
            }
        }
    }
    set.into_iter().collect()
}

#[derive(Clone, Debug)]
pub struct PrivateConfig {
    /// Fraction of vertices that own a private graph.
    pub owner_fraction: f64,
    /// Private edges from each owner to random non-neighbors.
    pub star_edges: usize,
    /// Extra private edges among the owner's private neighbors (0 = pure star).
    pub extra_edges: usize,
    /// Attach random public and private keyword sets.
    pub attributes: bool,
}

impl Default for PrivateConfig {
    fn default() -> Self {
        PrivateConfig {
            owner_fraction: 0.1,
            star_edges: 3,
            extra_edges: 1,
            attributes: false,
        }
    }
}

fn keywords<R: Rng>(rng: &mut R) -> KeywordSet {
    let k = rng.gen_range(0..=5);
    KeywordSet::new(VOCABULARY.choose_multiple(rng, k).copied()).expect("at most five")
}

/// Adds random private graphs on top of a public edge list.
pub fn random_pp_graph<R: Rng>(
    rng: &mut R,
    n: usize,
    public_edges: &[Edge],
    cfg: &PrivateConfig,
) -> Result<PPGraph> {
    let public = PublicGraph::from_edges(n, public_edges.iter().copied())?;
    let owners = ((n as f64) * cfg.owner_fraction).round() as usize;
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    let mut owner_ids: Vec<VertexId> = all[..owners.min(n)].iter().map(|&i| VertexId::from_index(i)).collect();
    owner_ids.sort_unstable();

    let mut private = Vec::with_capacity(owner_ids.len());
    for &u in &owner_ids {
        let mut edges = BTreeSet::new();
        let mut spokes = Vec::new();
        let mut tries = 0;
        while spokes.len() < cfg.star_edges && tries < 20 * (cfg.star_edges + 1) && n > 1 {
            tries += 1;
            let x = VertexId::from_index(rng.gen_range(0..n));
            if x != u && !public.has_edge(u, x) && edges.insert(ordered_edge(u, x)) {
                spokes.push(x);
            }
        }
        let mut added = 0;
        tries = 0;
        while added < cfg.extra_edges && spokes.len() >= 2 && tries < 20 * (cfg.extra_edges + 1) {
            tries += 1;
            let a = *spokes.choose(rng).unwrap();
            let b = *spokes.choose(rng).unwrap();
            if a != b && !public.has_edge(a, b) && edges.insert(ordered_edge(a, b)) {
                added += 1;
            }
        }
        private.push(PrivateGraph::new(u, edges)?);
    }

    let mut attrs = AttributeStore::new();
    if cfg.attributes {
        for i in 0..n {
            attrs.set_public(VertexId::from_index(i), keywords(rng));
        }
        for pg in private.iter().filter(|pg| !pg.is_empty()) {
            for &v in pg.vertices() {
                attrs.set_private(pg.owner(), v, keywords(rng));
            }
        }
    }
    let names = (0..n).map(|i| format!("v{i}")).collect();
    PPGraph::new(names, public, private, attrs)
}
